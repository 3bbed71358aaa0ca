#include <gtest/gtest.h>

#include <map>

#include "geogate/errors.hpp"
#include "geogate/pulse_compiler.hpp"
#include "test_util.hpp"

using namespace geogate;

namespace {

const SolvedPair& solved(double epsilon, double gamma) {
  static std::map<std::pair<double, double>, SolvedPair> cache;
  auto it = cache.find({epsilon, gamma});
  if (it == cache.end()) it = cache.emplace(std::make_pair(epsilon, gamma), solve(epsilon, gamma)).first;
  return it->second;
}

Operator2 y_rotation_oracle(double angle) {
  return oracle::expm(Operator2(-0.5 * kI * angle * pauli(2)));
}

}  // namespace

TEST(Sequence, TrivialProducts) {
  EXPECT_LT(max_norm(sequence_unitary(std::vector<PulseElement>{}) - identity2()), 1e-15);
  const std::vector<PulseElement> pair{HardRotation{Vec3::UnitY(), kPi},
                                       HardRotation{Vec3::UnitY(), -kPi}};
  EXPECT_LT(max_norm(sequence_unitary(pair) - identity2()), 1e-15);
}

TEST(Sequence, ZeroThetaPair) {
  GeneralLoopSpec s;
  s.loop1 = LoopDrive{1.0, 2.0, 1.0};
  s.loop2 = LoopDrive{1.0, 0.0, 1.0};
  const PulseSequence seq = compile_echo(s, 0.5);
  ASSERT_EQ(seq.elements.size(), 5u);
  EXPECT_NEAR(std::get<HardRotation>(seq.elements[1]).angle, 0.0, 1e-15);
  EXPECT_NEAR(std::get<HardRotation>(seq.elements[2]).angle, kPi, 1e-15);
  EXPECT_NEAR(std::get<HardRotation>(seq.elements[4]).angle, -kPi, 1e-15);
  ASSERT_EQ(seq.merged.size(), 4u);
  EXPECT_NEAR(std::get<HardRotation>(seq.merged[1]).angle, kPi, 1e-15);
}

TEST(Sequence, HalfPhasePairStructure) {
  const PulseSequence seq = compile_echo(solved(0.5, 0.5));
  ASSERT_EQ(seq.elements.size(), 5u);
  EXPECT_TRUE(std::holds_alternative<SoftEvolution>(seq.elements[0]));
  EXPECT_TRUE(std::holds_alternative<SoftEvolution>(seq.elements[3]));
  EXPECT_EQ(std::get<SoftEvolution>(seq.elements[3]).orientation, LoopOrientation::Loop2Reversed);
  // Physical y-pulse angle; the published table lists the opposite orientation.
  EXPECT_NEAR(std::get<HardRotation>(seq.elements[1]).angle, 0.7298, 1e-4);
  const SoftEvolution& soft2 = std::get<SoftEvolution>(seq.elements[3]);
  EXPECT_NEAR(soft2.drive.omega_rf, solved(0.5, 0.5).pair.omega2_rf_tilde, 1e-15);
  EXPECT_NEAR(soft2.drive.omega0, -1.0, 1e-15);
}

TEST(Sequence, UnsolvedPairRejected) {
  SolvedPair bad = solved(0.5, 0.5);
  bad.residuals.r_dyn = 1e-3;
  EXPECT_THROW(compile_echo(bad), InvalidArgument);
}

TEST(Sequence, IndependentPropagationOfEchoSequence) {
  const SolvedPair& sp = solved(0.3, 0.5);
  const PulseSequence seq = compile_echo(sp);
  const NmrLoopPair& p = sp.pair;
  auto drive = [&](double rf) {
    return [&p, rf](double t) {
      return Vec3(p.omega1() * std::cos(rf * t), -p.omega1() * std::sin(rf * t), p.omega0_tilde);
    };
  };
  const Operator2 u1 =
      oracle::midpoint_propagator(drive(p.omega1_rf_tilde), 2 * kPi / std::abs(p.omega1_rf_tilde), 20000);
  const Operator2 u2 =
      oracle::midpoint_propagator(drive(p.omega2_rf_tilde), 2 * kPi / std::abs(p.omega2_rf_tilde), 20000);
  const Operator2 ref = y_rotation_oracle(-kPi) * u2 * y_rotation_oracle(kPi) *
                        y_rotation_oracle(sp.geometry.theta) * u1;
  EXPECT_LT(max_norm(sequence_unitary(seq) - ref), 1e-6);
}

TEST(Sequence, MatchesClosedFormForAllSolvedPairs) {
  for (double gamma : {0.25, 0.5, 1.0}) {
    for (double eps : {0.5, 0.3, 0.1}) {
      const SolvedPair& sp = solved(eps, gamma);
      const PulseSequence seq = compile_echo(sp);
      const Operator2 u = sequence_unitary(seq);
      EXPECT_LE(distance_up_to_global_phase(u, closed_form_echo(sp.geometry, gamma)), 1e-9);
      SequenceOptions merged;
      merged.use_merged = true;
      EXPECT_LE(max_norm(sequence_unitary(seq, merged) - u), 1e-12);
      EXPECT_LE(distance_up_to_global_phase(zw_gate(sp.pair, gamma),
                                            rotation(Vec3::UnitY(), -sp.geometry.theta) * u),
                1e-9);
      EXPECT_LT(unitarity_defect(u), 1e-12);
    }
  }
}

TEST(Sequence, FiniteHardPulsesApproachIdealLimit) {
  const PulseSequence seq = compile_echo(solved(0.5, 0.5));
  const Operator2 ideal = sequence_unitary(seq);
  SequenceOptions finite;
  finite.finite_hard_pulses = true;
  finite.hard_pulse_duration = 1e-7;
  EXPECT_LT(distance_up_to_global_phase(sequence_unitary(seq, finite), ideal), 1e-6);
  finite.hard_pulse_duration = kHardPulseDuration;
  const double d = distance_up_to_global_phase(sequence_unitary(seq, finite), ideal);
  EXPECT_GT(d, 1e-3);
  EXPECT_LT(d, 0.2);
}

TEST(Sequence, AmplitudeScaleOfOneIsNeutral) {
  const PulseSequence seq = compile_echo(solved(0.1, 0.5));
  SequenceOptions o;
  o.amplitude_scale = 1.0;
  EXPECT_EQ(sequence_unitary(seq, o), sequence_unitary(seq));
  o.amplitude_scale = -1.0;
  EXPECT_LT(unitarity_defect(sequence_unitary(seq, o)), 1e-12);
}

TEST(ClosedForm, HalfPhaseForm) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < 50; ++k) {
    const double theta = u(rng), Theta = u(rng);
    EXPECT_LT(max_norm(closed_form_echo(theta, Theta, 0.5) - gamma_half_gate(Theta)), 1e-15);
  }
  EXPECT_LT(max_norm(closed_form_echo(0.0, 0.3, 0.0) - identity2()), 1e-15);
  Operator2 ref;
  ref << 1.0, -1.0, -1.0, -1.0;
  EXPECT_LT(max_norm(closed_form_echo(0.2, -kPi / 4, 0.5) - (-kI) * ref / std::sqrt(2.0)), 1e-15);
}

TEST(ClosedForm, EchoIsProductOfYRotations) {
  // At Gamma = 0 the echo reduces to a pure y rotation by theta.
  for (double theta : {-1.0, 0.3, 2.0}) {
    EXPECT_LT(max_norm(closed_form_echo(theta, 0.7, 0.0) - y_rotation_oracle(theta)), 1e-15);
  }
}

TEST(ZwGate, Identities) {
  const NmrLoopPair& p = solved(0.5, 0.5).pair;
  EXPECT_LT(distance_up_to_global_phase(zw_gate(p, 1.0), -identity2()), 1e-12);
  EXPECT_LT(max_norm(zw_gate(p, 1.0) + identity2()), 1e-12);
  const Operator2 v = zw_gate(p, 0.5);
  EXPECT_LT(max_norm(v * v + identity2()), 1e-12);
  const auto [plus, minus] = cyclic_states(p.loop1_field());
  for (double gamma : {0.25, 0.5, 0.9}) {
    const Operator2 w = zw_gate(p, gamma);
    EXPECT_LT((w * plus - std::polar(1.0, gamma * kPi) * plus).norm(), 1e-10);
    EXPECT_LT((w * minus - std::polar(1.0, -gamma * kPi) * minus).norm(), 1e-10);
  }
}

TEST(GammaHalfGate, Properties) {
  EXPECT_LT(max_norm(gamma_half_gate(0.0) + kI * pauli(3)), 1e-15);
  EXPECT_LT(max_norm(gamma_half_gate(kPi / 2) + kI * pauli(1)), 1e-15);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < 100; ++k) {
    const double t = u(rng);
    const Operator2 g = gamma_half_gate(t);
    EXPECT_LT(max_norm(g * g + identity2()), 1e-12);
    const Operator2 r = kI * g;
    EXPECT_LT(r.imag().cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(max_norm(r - r.transpose()), 1e-15);
    EXPECT_NEAR(std::abs(r.determinant()), 1.0, 1e-12);
  }
}

TEST(GammaHalfGate, TableThetaGate) {
  const Operator2 g = gamma_half_gate(-0.639);
  EXPECT_NEAR(g(0, 0).imag(), -std::cos(-0.639), 1e-15);
  EXPECT_NEAR(g(0, 1).imag(), -std::sin(-0.639), 1e-15);
  const SolvedPair& sp = solved(0.5, 0.5);
  EXPECT_LT(distance_up_to_global_phase(gamma_half_gate(sp.geometry.Theta),
                                        sequence_unitary(compile_echo(sp))),
            1e-9);
}

TEST(Hadamard, SignOfTheta) {
  const HadamardComparison minus = hadamard_equivalence(-kPi / 4);
  EXPECT_LT(minus.distance_to_z_hadamard_z, 1e-15);
  EXPECT_GT(minus.distance_to_hadamard, 0.5);
  const HadamardComparison plus = hadamard_equivalence(kPi / 4);
  EXPECT_LT(plus.distance_to_hadamard, 1e-15);
  EXPECT_NE(minus.note.find("sigma_z"), std::string::npos);
}
