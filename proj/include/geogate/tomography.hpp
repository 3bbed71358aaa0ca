#pragma once

#include <array>
#include <optional>
#include <vector>

#include "geogate/pulse_compiler.hpp"

namespace geogate {

inline constexpr double kChiClip = 1e-10;

/// Operators E_k of rho -> sum_k E_k rho E_k^dagger / n with n = Tr[sum E_k^dagger E_k] / 2.
struct KrausSet {
  std::vector<Operator2> operators;

  double normalizer() const;  // Tr[sum_k E_k^dagger E_k]
  DensityMatrix apply(const DensityMatrix& rho) const;
  /// Trace of sum_k E_k rho E_k^dagger before normalization.
  double raw_trace(const DensityMatrix& rho) const;
};

KrausSet unitary_channel(const Operator2& u);
KrausSet depolarizing_channel();  // {sigma_m / 2}
/// Kraus operators of a applied after b.
KrausSet compose(const KrausSet& a, const KrausSet& b);

struct QuadraturePoint {
  double scale = 1.0;
  double weight = 1.0;
};

/// Static rf-amplitude scale distribution.
struct NoiseModel {
  std::vector<QuadraturePoint> points{{1.0, 1.0}};
  double width = 0.0;

  void validate() const;
};

/// Probabilists' Gauss-Hermite rule for N(1, width^2).
NoiseModel gauss_hermite_noise(double width, int order = 7);

/// Noise-free: {U}. Otherwise {sqrt(w_s) U(s)} with U(s) the sequence unitary at
/// amplitude scale s.
KrausSet channel_of(const PulseSequence& seq, const std::optional<NoiseModel>& noise = std::nullopt,
                    const SequenceOptions& options = {});

struct ProcessMatrix {
  Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();  // over {1, sigma_x, sigma_y, sigma_z}
  std::array<double, 4> input_traces{};             // raw output trace per probe input
  double hermiticity_defect = 0.0;
};

/// Probe inputs |0>, |1>, |+>, |+i>.
std::array<DensityMatrix, 4> tomography_inputs();

ProcessMatrix process_tomography(const KrausSet& channel);

/// E(rho) = sum_mn chi_mn sigma_m rho sigma_n.
DensityMatrix apply_chi(const ProcessMatrix& chi, const DensityMatrix& rho);

/// Eigen-decomposition of chi. Eigenvalues in [-clip, clip] are dropped; below -clip
/// throws NonphysicalProcess. Operators are ordered by decreasing weight.
KrausSet kraus_from_chi(const ProcessMatrix& chi, double clip = kChiClip);

/// sum_k |Tr[E_k target^dagger I0]|^2 / Tr[sum_k E_k I0 E_k^dagger] with I0 = 1/2.
double entanglement_fidelity(const KrausSet& channel, const Operator2& target);

/// <sin(5 pi s / 2)> / <sin(pi s / 2)> under the quadrature.
double pulse_signal_ratio(const NoiseModel& noise);

/// Width w of the 7-point rule giving the requested 5pi/2-to-pi/2 signal ratio,
/// searched on [0, 0.3]. Throws CalibrationFailure when out of reach.
NoiseModel calibrate_rf_noise(double target_ratio);

struct SurfacePoint {
  double theta_in = 0.0;
  double phi_in = 0.0;
  BlochVector in = BlochVector::Zero();
  BlochVector out = BlochVector::Zero();
};

struct SurfaceMap {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<SurfacePoint> points;  // theta-major

  double max_image_norm() const;
  double min_image_norm() const;
};

/// theta_in on [0, pi] inclusive, phi_in on [0, 2 pi) exclusive.
SurfaceMap bloch_surface(const KrausSet& channel, int n_theta, int n_phi);

struct PublishedFidelity {
  double epsilon;
  double fe_single;
  double trace_single;
  double fe_double;
  double trace_double;
};
const std::array<PublishedFidelity, 3>& published_table2();

struct FidelityReport {
  double epsilon = 0.0;
  double gamma = 0.0;
  double fe_single = 0.0;
  double fe_double = 0.0;
  double trace_single = 0.0;
  double trace_double = 0.0;
  double noise_width = 0.0;
  std::optional<PublishedFidelity> published;
};

/// Single operation against the ideal echo gate, double operation against its square
/// (-1 at Gamma = 1/2).
FidelityReport fidelity_report(const SolvedPair& solved, const NoiseModel& noise);

}  // namespace geogate
