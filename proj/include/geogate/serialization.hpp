#pragma once

#include <json.hpp>
#include <ostream>
#include <vector>

#include "geogate/tomography.hpp"

namespace geogate {

using Json = nlohmann::ordered_json;

/// Complex matrices are row-major arrays of rows of [re, im] pairs.
Json matrix_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const Json& j);

Json vec3_json(const Vec3& v);

Json lab_field_json(const LabField& f);
LabField lab_field_from_json(const Json& j);

Json cyclic_report_json(const LabField& f, const CyclicReport& r);
Json numeric_phases_json(const NumericPhases& p);

Json geometry_json(const LoopGeometry& g);
Json residuals_json(const Residuals& r);
Json phase_sums_json(const PhaseSums& s);
Json reported_json(const ReportedSolution& r);

/// {epsilon, gamma, omega0_tilde, omega1_rf_tilde, omega2_rf_tilde, chi1, chi2, theta,
///  Theta, residuals{...}, convention_id, reported{...}}.
Json solved_pair_json(const SolvedPair& s);
Json table1_json(const Table1Report& r);
Json fig3_json(const Fig3Report& r);

Json element_json(const PulseElement& e);
Json sequence_json(const PulseSequence& seq);

struct GateReport {
  PulseSequence sequence;
  Operator2 unitary;
  Operator2 closed_form;
  Operator2 zw;
  double distance_closed_form = 0.0;
  double distance_zw = 0.0;  // V_ZW vs R_y(-theta) U
};
Json gate_report_json(const GateReport& r);

Json noise_json(const NoiseModel& n);
Json process_matrix_json(const ProcessMatrix& p);
Json fidelity_report_json(const FidelityReport& r);

/// Header t,nx,ny,nz. Nine decimals.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples);
/// Header theta_in,phi_in,nx_in,ny_in,nz_in,nx_out,ny_out,nz_out. Nine decimals.
void write_surface_csv(std::ostream& out, const SurfaceMap& map);

}  // namespace geogate
