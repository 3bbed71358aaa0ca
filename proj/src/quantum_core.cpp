#include "geogate/quantum_core.hpp"

#include <algorithm>
#include <cmath>

#include "geogate/errors.hpp"

namespace geogate {

Operator2 pauli(int k) {
  Operator2 m;
  switch (k) {
    case 0:
      m << 1.0, 0.0, 0.0, 1.0;
      break;
    case 1:
      m << 0.0, 1.0, 1.0, 0.0;
      break;
    case 2:
      m << 0.0, -kI, kI, 0.0;
      break;
    case 3:
      m << 1.0, 0.0, 0.0, -1.0;
      break;
    default:
      throw InvalidArgument("pauli index must be in 0..3");
  }
  return m;
}

Operator2 identity2() { return Operator2::Identity(); }

Operator2 dot_sigma(const Vec3& n) {
  Operator2 m;
  m << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
  return m;
}

Operator2 rotation(const Vec3& axis, double angle) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > kAxisNormTol) {
    throw InvalidArgument("rotation axis must be a unit vector");
  }
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return c * identity2() - kI * s * dot_sigma(axis);
}

Eigen::Matrix3d so3_rotation_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

PureState basis_state(int index) {
  if (index != 0 && index != 1) throw InvalidArgument("qubit basis index must be 0 or 1");
  PureState s = PureState::Zero();
  s(index) = 1.0;
  return s;
}

BlochVector bloch_of(const PureState& state) {
  if (std::abs(state.squaredNorm() - 1.0) > kStateNormTol) {
    throw InvalidArgument("bloch_of requires a normalized state");
  }
  return bloch_of(DensityMatrix(state * state.adjoint()));
}

BlochVector bloch_of(const DensityMatrix& rho) {
  BlochVector r;
  for (int k = 1; k <= 3; ++k) r(k - 1) = (rho * pauli(k)).trace().real();
  return r;
}

DensityMatrix density_of(const PureState& state) { return state * state.adjoint(); }

DensityMatrix density_from_bloch(const BlochVector& r) {
  return 0.5 * (identity2() + dot_sigma(r));
}

DensityMatrix apply_channel(std::span<const Operator2> kraus, const DensityMatrix& rho) {
  if (kraus.empty()) throw InvalidArgument("channel needs at least one Kraus operator");
  DensityMatrix out = DensityMatrix::Zero();
  Operator2 completeness = Operator2::Zero();
  for (const auto& e : kraus) {
    out += e * rho * e.adjoint();
    completeness += e.adjoint() * e;
  }
  const double normalizer = completeness.trace().real() / 2.0;
  if (!(normalizer > 0.0)) throw InvalidArgument("Kraus set has zero weight");
  return out / normalizer;
}

double max_norm(const Operator2& a) { return a.cwiseAbs().maxCoeff(); }

double unitarity_defect(const Operator2& u) {
  return max_norm(u.adjoint() * u - identity2());
}

double distance_up_to_global_phase(const Operator2& a, const Operator2& b) {
  const Complex overlap = (a.adjoint() * b).trace();
  if (std::abs(overlap) < 1e-14) return max_norm(a - b);
  const Complex align = std::conj(overlap) / std::abs(overlap);
  return max_norm(a - align * b);
}

HermitianEigen2 hermitian_eigen(const Operator2& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const Complex b = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
  const double mean = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), std::abs(b));

  HermitianEigen2 out;
  out.values << mean - half_gap, mean + half_gap;
  if (std::abs(b) <= 1e-300) {
    // already diagonal
    if (a <= d) {
      out.vectors = Operator2::Identity();
    } else {
      out.vectors << 0.0, 1.0, 1.0, 0.0;
    }
    return out;
  }
  for (int j = 0; j < 2; ++j) {
    const double lambda = out.values(j);
    // Two equivalent null vectors of (h - lambda); pick the better conditioned.
    PureState v1(b, lambda - a);
    PureState v2(lambda - d, std::conj(b));
    PureState v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
    out.vectors.col(j) = v.normalized();
  }
  return out;
}

double wrap_pi(double angle) {
  double w = std::remainder(angle, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace geogate
