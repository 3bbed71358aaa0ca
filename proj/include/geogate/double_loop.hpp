#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geogate/spin_dynamics.hpp"

namespace geogate {

/// One rotating drive (omega1 cos w_rf t, -omega1 sin w_rf t, omega0).
struct LoopDrive {
  double omega1 = 0.0;
  double omega0 = 0.0;
  double omega_rf = 1.0;

  LabField field() const { return LabField{omega0, omega1, omega_rf, 0.0}; }
};

/// Two successive loops. With loop2_reversed the second drive is negated before
/// being tilted about y so that its cyclic axis meets loop 1's; otherwise it is
/// only tilted.
struct GeneralLoopSpec {
  LoopDrive loop1;
  LoopDrive loop2;
  bool loop2_reversed = true;

  void validate() const;
};

/// Liquid-state NMR parameterization: common offset omega0_tilde < 0, common
/// amplitude epsilon |omega0_tilde|, and one soft-pulse frequency per loop. Loop 2
/// is played through a +-pi echo, so its physical drive is the plain rotating
/// field at omega2_rf_tilde.
struct NmrLoopPair {
  double omega0_tilde = -1.0;
  double epsilon = 0.5;
  double omega1_rf_tilde = -0.5;
  double omega2_rf_tilde = 0.5;
  double gamma = 0.5;  // target geometric phase, units of pi

  void validate() const;
  double omega1() const { return epsilon * std::abs(omega0_tilde); }
  LabField loop1_field() const;
  LabField loop2_field() const;
  GeneralLoopSpec to_general() const;
};

/// Loop angles use the branch chi = atan2(omega_i1, Delta_i) - pi, i.e. chi in
/// [-pi, 0] measures the polar angle of -m_i. With it the echo unitary is given
/// literally by the Gamma/theta/Theta matrix form and theta is the physical
/// y-pulse angle.
struct LoopGeometry {
  double chi1 = 0.0;
  double chi2 = 0.0;
  double theta = 0.0;  // chi2 - chi1
  double Theta = 0.0;  // (chi1 + chi2) / 2
  double delta1 = 0.0;
  double delta2 = 0.0;
  double omega1_eff = 0.0;
  double omega2_eff = 0.0;
};

LoopGeometry geometry_of(const GeneralLoopSpec& spec);
LoopGeometry geometry_of(const NmrLoopPair& pair);

/// Lab-frame loop-2 field after negation (if reversed) and tilt.
FieldFunction loop2_lab_field(const GeneralLoopSpec& spec, const LoopGeometry& geometry);

/// Branch of loop 2's drive that carries psi_1+ after tilting by theta: Plus when
/// the tilted axis is parallel to loop 1's, Minus when antiparallel. Throws
/// ConventionError when neither holds within 1e-6.
Branch connection_branch(const GeneralLoopSpec& spec, double theta);

struct PhaseSums {
  double dynamical = 0.0;  // gamma_1d + gamma_2d
  double geometric = 0.0;  // sum of per-loop geometric parts, each in [0, 2 pi)
  double dynamical_loop1 = 0.0;
  double dynamical_loop2 = 0.0;
  double geometric_loop1 = 0.0;
  double geometric_loop2 = 0.0;
  double cyclicity = 0.0;  // |<psi_1+|psi(tau_1 + tau_2)>|
  Branch loop2_branch = Branch::Minus;
};

/// Integrates the connected cyclic state psi_1+ through both loops and sums the
/// quadrature dynamical phases. Throws ConventionError if loop 2's cyclic axis is
/// not (anti)parallel to loop 1's within 1e-6.
PhaseSums phase_sums_oracle(const GeneralLoopSpec& spec, int steps = kDefaultSteps);
PhaseSums phase_sums_oracle(const NmrLoopPair& pair, int steps = kDefaultSteps);

/// Same sums from the per-loop closed forms.
PhaseSums phase_sums_closed(const GeneralLoopSpec& spec);

struct Residuals {
  double r_dyn = 0.0;         // oracle dynamical sum
  double r_geo = 0.0;         // oracle geometric sum - Gamma pi, wrapped to (-pi, pi]
  double r_dyn_closed = 0.0;  // literal common-rf dynamical condition
  double r_geo_closed = 0.0;  // literal common-rf geometric condition
  double dyn_sum_closed = 0.0;
  double geo_sum_closed = 0.0;
};

Residuals residuals(const GeneralLoopSpec& spec, double gamma, int steps = kDefaultSteps);
Residuals residuals(const NmrLoopPair& pair, int steps = kDefaultSteps);

enum class ChiBranch { Lower, Upper, Principal };

/// Ways of reading (rf ratio sign, chi branch, theta orientation) when comparing
/// with published tables.
struct ReportingConvention {
  int rf_sign = 1;
  ChiBranch branch = ChiBranch::Lower;
  int theta_sign = 1;

  std::string id() const;
};

std::vector<ReportingConvention> enumerate_conventions();
/// Convention under which the published Gamma = 1/2 table is reproduced.
ReportingConvention table_convention();

struct ReportedSolution {
  double ratio1 = 0.0;  // omega1_rf_tilde / omega0_tilde
  double ratio2 = 0.0;
  double theta = 0.0;
  double Theta = 0.0;
};

ReportedSolution report_under(const NmrLoopPair& pair, const ReportingConvention& convention);

struct SolveOptions {
  int steps = kDefaultSteps;
  int coarse_steps = 2000;
  double tolerance = 1e-10;
  int max_iterations = 60;
  std::optional<std::pair<double, double>> guess;  // rf ratios omega_i_rf / omega0_tilde
};

struct SolvedPair {
  NmrLoopPair pair;
  LoopGeometry geometry;
  Residuals residuals;
  std::string convention_id;
  int start_index = -1;  // -1 for a user guess
  int iterations = 0;
};

/// Finds (omega1_rf_tilde, omega2_rf_tilde) of opposite signs with vanishing
/// oracle dynamical sum and geometric sum = Gamma pi (mod 2 pi).
SolvedPair solve(double epsilon, double gamma, double omega0_tilde = -1.0,
                 const SolveOptions& options = {});

struct Table1Entry {
  double epsilon = 0.0;
  ReportedSolution published;
  ReportedSolution solved;
  std::array<double, 4> deviation{};  // relative, |solved - published| / |published|
  bool match = false;
  std::string note;
};

struct ConventionScore {
  ReportingConvention convention;
  int rows_matched = 0;
  double worst_deviation = 0.0;
};

struct Table1Report {
  std::vector<SolvedPair> solutions;
  std::vector<Table1Entry> rows;  // under the best convention
  ReportingConvention convention;
  std::vector<ConventionScore> scores;
  bool all_rows_match = false;
  std::string summary;
};

inline constexpr double kRatioTolerance = 0.02;
inline constexpr double kAngleTolerance = 0.05;

const std::array<std::pair<double, ReportedSolution>, 3>& published_table1();
Table1Report table1_report(const SolveOptions& options = {});

struct Fig3Report {
  GeneralLoopSpec spec;
  PhaseSums sums;
  PhaseSums sums_doubled;
  double r_dyn_closed = 0.0;
  double gamma_from_closed = 0.0;  // 2 - (Delta1/Omega1 + Delta2/Omega2)
  double gamma_from_oracle = 0.0;  // geometric sum / pi, reduced into (0, 2]
  double caption_gamma = 0.5;
  bool dynamical_nulled = false;
  double doubling_consistency = 0.0;
  std::string note;
};

GeneralLoopSpec fig3_spec();
Fig3Report fig3_report(int steps = kDefaultSteps);

}  // namespace geogate
