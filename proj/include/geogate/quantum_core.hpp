#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace geogate {

using Complex = std::complex<double>;
using Operator2 = Eigen::Matrix2cd;
using PureState = Eigen::Vector2cd;
using DensityMatrix = Eigen::Matrix2cd;
using BlochVector = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// Tolerance on |<psi|psi> - 1| accepted as "normalized".
inline constexpr double kStateNormTol = 1e-9;
inline constexpr double kAxisNormTol = 1e-9;

/// Pauli operator sigma_k for k = 0 (identity), 1 (x), 2 (y), 3 (z).
Operator2 pauli(int k);
Operator2 identity2();

/// n . sigma for a real 3-vector.
Operator2 dot_sigma(const Vec3& n);

/// exp(-i angle (axis . sigma) / 2). Throws InvalidArgument for a non-unit axis.
Operator2 rotation(const Vec3& axis, double angle);

/// 3x3 rotation about y acting on Bloch vectors: (0,0,1) -> (sin a, 0, cos a).
/// Matches the SU(2) action of rotation(y, a).
Eigen::Matrix3d so3_rotation_y(double angle);

PureState basis_state(int index);

/// <psi|sigma|psi>. Throws InvalidArgument unless the state is normalized.
BlochVector bloch_of(const PureState& state);

/// (Tr[rho sigma_x], Tr[rho sigma_y], Tr[rho sigma_z]) of an arbitrary 2x2 operator.
BlochVector bloch_of(const DensityMatrix& rho);

DensityMatrix density_of(const PureState& state);
DensityMatrix density_from_bloch(const BlochVector& r);

/// Kraus map rho -> sum_k E_k rho E_k^dagger / n, where n = Tr[sum_k E_k^dagger E_k] / 2
/// (n = 1 for a trace-preserving set). Throws InvalidArgument on an empty set.
DensityMatrix apply_channel(std::span<const Operator2> kraus, const DensityMatrix& rho);

/// min over alpha of max_ij |A - e^{i alpha} B|_ij, with alpha aligned to the
/// phase of Tr[A^dagger B]. When that trace vanishes the unaligned residual
/// max_ij |A - B|_ij is returned.
double distance_up_to_global_phase(const Operator2& a, const Operator2& b);

/// Entrywise max-norm.
double max_norm(const Operator2& a);

/// max |U^dagger U - 1|.
double unitarity_defect(const Operator2& u);

/// Closed-form eigen-decomposition of a 2x2 Hermitian matrix; eigenvalues ascending.
struct HermitianEigen2 {
  Eigen::Vector2d values;
  Eigen::Matrix2cd vectors;  // columns
};
HermitianEigen2 hermitian_eigen(const Operator2& h);

/// Wrap an angle into (-pi, pi].
double wrap_pi(double angle);

}  // namespace geogate
