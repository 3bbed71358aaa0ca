#include <gtest/gtest.h>

#include <vector>

#include "geogate/errors.hpp"
#include "geogate/quantum_core.hpp"
#include "test_util.hpp"

using namespace geogate;

TEST(Pauli, AlgebraAndRange) {
  const Operator2 x = pauli(1), y = pauli(2), z = pauli(3);
  EXPECT_LT(max_norm(x * y - kI * z), 1e-15);
  EXPECT_LT(max_norm(y * z - kI * x), 1e-15);
  EXPECT_LT(max_norm(z * z - identity2()), 1e-15);
  EXPECT_THROW(pauli(4), InvalidArgument);
}

TEST(Rotation, MatchesMatrixExponential) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Vec3 axis = Vec3(n(rng), n(rng), n(rng)).normalized();
    const double angle = 3.0 * n(rng);
    const Operator2 ref = oracle::expm(Operator2(-0.5 * kI * angle * dot_sigma(axis)));
    EXPECT_LT(max_norm(rotation(axis, angle) - ref), 1e-13);
  }
}

TEST(Rotation, QuarterTurnAboutY) {
  Operator2 ref;
  ref << 1.0, -1.0, 1.0, 1.0;
  EXPECT_LT(max_norm(rotation(Vec3::UnitY(), kPi / 2) - ref / std::sqrt(2.0)), 1e-15);
}

TEST(Rotation, RejectsNonUnitAxis) {
  EXPECT_THROW(rotation(Vec3(1.0, 1.0, 0.0), 0.3), InvalidArgument);
  EXPECT_THROW(rotation(Vec3::Zero(), 0.3), InvalidArgument);
}

TEST(Rotation, So3MatchesSu2Action) {
  for (double a : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    const Operator2 u = rotation(Vec3::UnitY(), a);
    const Vec3 n(0.3, -0.4, std::sqrt(1 - 0.25));
    const Vec3 rotated = bloch_of(Operator2(u * density_from_bloch(n) * u.adjoint()));
    EXPECT_LT((rotated - so3_rotation_y(a) * n).norm(), 1e-14);
  }
}

TEST(Bloch, StatesAndDensities) {
  EXPECT_LT((bloch_of(basis_state(0)) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((bloch_of(basis_state(1)) - Vec3(0, 0, -1)).norm(), 1e-15);
  const PureState plus = PureState(1.0, 1.0) / std::sqrt(2.0);
  EXPECT_LT((bloch_of(plus) - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_THROW(bloch_of(PureState(1.0, 1.0)), InvalidArgument);
  EXPECT_THROW(basis_state(2), InvalidArgument);
}

TEST(Bloch, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const PureState s = oracle::random_state(rng);
    const Vec3 n = bloch_of(s);
    EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    EXPECT_LT(max_norm(density_from_bloch(n) - density_of(s)), 1e-12);
  }
}

TEST(Channel, NormalizesByCompleteness) {
  const DensityMatrix rho = density_of(basis_state(0));
  std::vector<Operator2> doubled{2.0 * pauli(1)};
  EXPECT_LT(max_norm(apply_channel(doubled, rho) - density_of(basis_state(1))), 1e-15);
  std::vector<Operator2> empty;
  EXPECT_THROW(apply_channel(empty, rho), InvalidArgument);
}

TEST(Distance, GlobalPhase) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Operator2 u = oracle::random_unitary(rng);
    const double a = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    EXPECT_LT(distance_up_to_global_phase(u, std::polar(1.0, a) * u), 1e-14);
  }
  // Tr[1 sigma_x] = 0, so the unaligned entrywise residual is reported: 1.
  EXPECT_NEAR(distance_up_to_global_phase(identity2(), pauli(1)), 1.0, 1e-15);
}

TEST(Distance, NeverExceedsBruteForceMinimum) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const Operator2 a = oracle::random_unitary(rng);
    const Operator2 b = oracle::random_unitary(rng);
    double best = 1e9;
    for (int j = 0; j < 20000; ++j) {
      best = std::min(best, max_norm(a - std::polar(1.0, 2 * kPi * j / 20000.0) * b));
    }
    // Phase alignment by the trace is near optimal for the max-norm.
    EXPECT_LE(distance_up_to_global_phase(a, b), 2.0 * best + 1e-12);
  }
}

TEST(HermitianEigen, MatchesEigenSolver) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Operator2 h;
    const Complex b(n(rng), n(rng));
    h << n(rng), b, std::conj(b), n(rng);
    const HermitianEigen2 e = hermitian_eigen(h);
    Eigen::SelfAdjointEigenSolver<Operator2> ref(h);
    EXPECT_NEAR(e.values(0), ref.eigenvalues()(0), 1e-12);
    EXPECT_NEAR(e.values(1), ref.eigenvalues()(1), 1e-12);
    for (int j = 0; j < 2; ++j) {
      EXPECT_LT((h * e.vectors.col(j) - e.values(j) * e.vectors.col(j)).norm(), 1e-12);
    }
  }
  const HermitianEigen2 d = hermitian_eigen(pauli(3));
  EXPECT_EQ(d.values(0), -1.0);
  EXPECT_LT((d.vectors.col(0) - basis_state(1)).norm(), 1e-15);
}

TEST(WrapPi, Range) {
  EXPECT_DOUBLE_EQ(wrap_pi(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_pi(-kPi), kPi);
  EXPECT_NEAR(wrap_pi(3 * kPi + 0.1), -kPi + 0.1, 1e-14);
  EXPECT_NEAR(wrap_pi(0.2), 0.2, 1e-16);
}
