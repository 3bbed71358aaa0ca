#include "geogate/serialization.hpp"

#include <cstdio>
#include <string>

#include "geogate/errors.hpp"

namespace geogate {
namespace {

std::string fixed9(double v) {
  char buf[64];
  // avoid "-0.000000000"
  if (std::abs(v) < 5e-10) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

const char* branch_name(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

Json branch_json(const BranchPhases& p) {
  return Json{{"total", p.total},
              {"total_wrapped", p.total_wrapped},
              {"dynamical", p.dynamical},
              {"geometric", p.geometric}};
}

}  // namespace

Json matrix_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw InvalidArgument("matrix JSON must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (j[r].size() != static_cast<std::size_t>(cols)) throw InvalidArgument("ragged matrix JSON");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = j[r][c];
      if (!e.is_array() || e.size() != 2) throw InvalidArgument("matrix entries are [re, im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json lab_field_json(const LabField& f) {
  return Json{{"omega0", f.omega0}, {"omega1", f.omega1}, {"omega_rf", f.omega_rf}, {"phi", f.phi + 0.0}};
}

LabField lab_field_from_json(const Json& j) {
  LabField f;
  f.omega0 = j.at("omega0").get<double>();
  f.omega1 = j.at("omega1").get<double>();
  f.omega_rf = j.at("omega_rf").get<double>();
  f.phi = j.value("phi", 0.0);
  f.validate();
  return f;
}

Json cyclic_report_json(const LabField& f, const CyclicReport& r) {
  const RotatingFrame frame = rotating_frame(f);
  return Json{{"field", lab_field_json(f)},
              {"tau", r.tau},
              {"delta", frame.delta},
              {"omega_eff", frame.omega_eff},
              {"chi", frame.chi},
              {"axis", vec3_json(frame.m)},
              {"psi_plus", matrix_json(r.psi_plus)},
              {"psi_minus", matrix_json(r.psi_minus)},
              {"plus", branch_json(r.plus)},
              {"minus", branch_json(r.minus)}};
}

Json numeric_phases_json(const NumericPhases& p) {
  return Json{{"total", p.total},
              {"dynamical", p.dynamical},
              {"geometric", p.geometric},
              {"cyclicity", p.cyclicity}};
}

Json geometry_json(const LoopGeometry& g) {
  return Json{{"chi1", g.chi1},     {"chi2", g.chi2},     {"theta", g.theta},
              {"Theta", g.Theta},   {"Delta1", g.delta1}, {"Delta2", g.delta2},
              {"Omega1", g.omega1_eff}, {"Omega2", g.omega2_eff}};
}

Json residuals_json(const Residuals& r) {
  return Json{{"r_dyn", r.r_dyn},
              {"r_geo", r.r_geo},
              {"r_dyn_closed", r.r_dyn_closed},
              {"r_geo_closed", r.r_geo_closed},
              {"dyn_sum_closed", r.dyn_sum_closed},
              {"geo_sum_closed", r.geo_sum_closed}};
}

Json phase_sums_json(const PhaseSums& s) {
  return Json{{"gamma_dyn_sum", s.dynamical},
              {"gamma_geo_sum", s.geometric},
              {"dynamical_loop1", s.dynamical_loop1},
              {"dynamical_loop2", s.dynamical_loop2},
              {"geometric_loop1", s.geometric_loop1},
              {"geometric_loop2", s.geometric_loop2},
              {"cyclicity", s.cyclicity},
              {"loop2_branch", branch_name(s.loop2_branch)}};
}

Json reported_json(const ReportedSolution& r) {
  return Json{{"ratio1", r.ratio1}, {"ratio2", r.ratio2}, {"theta", r.theta}, {"Theta", r.Theta}};
}

Json solved_pair_json(const SolvedPair& s) {
  const NmrLoopPair& p = s.pair;
  Json j{{"epsilon", p.epsilon},
         {"gamma", p.gamma},
         {"omega0_tilde", p.omega0_tilde},
         {"omega1_rf_tilde", p.omega1_rf_tilde},
         {"omega2_rf_tilde", p.omega2_rf_tilde},
         {"chi1", s.geometry.chi1},
         {"chi2", s.geometry.chi2},
         {"theta", s.geometry.theta},
         {"Theta", s.geometry.Theta},
         {"residuals", residuals_json(s.residuals)},
         {"convention_id", s.convention_id}};
  j["reported"] = reported_json(report_under(p, table_convention()));
  j["start_index"] = s.start_index;
  j["iterations"] = s.iterations;
  return j;
}

Json table1_json(const Table1Report& r) {
  Json rows = Json::array();
  for (const auto& e : r.rows) {
    rows.push_back(Json{{"epsilon", e.epsilon},
                        {"published", reported_json(e.published)},
                        {"solved", reported_json(e.solved)},
                        {"relative_deviation", Json{{"ratio1", e.deviation[0]},
                                                    {"ratio2", e.deviation[1]},
                                                    {"theta", e.deviation[2]},
                                                    {"Theta", e.deviation[3]}}},
                        {"match", e.match},
                        {"note", e.note}});
  }
  Json scores = Json::array();
  for (const auto& s : r.scores) {
    scores.push_back(Json{{"convention_id", s.convention.id()},
                          {"rows_matched", s.rows_matched},
                          {"worst_deviation", s.worst_deviation}});
  }
  Json solutions = Json::array();
  for (const auto& s : r.solutions) solutions.push_back(solved_pair_json(s));
  return Json{{"gamma", 0.5},
              {"convention_id", r.convention.id()},
              {"tolerance", Json{{"ratio", kRatioTolerance}, {"angle", kAngleTolerance}}},
              {"all_rows_match", r.all_rows_match},
              {"summary", r.summary},
              {"rows", rows},
              {"conventions", scores},
              {"solutions", solutions}};
}

Json fig3_json(const Fig3Report& r) {
  return Json{{"loop1", Json{{"omega1", r.spec.loop1.omega1},
                             {"omega0", r.spec.loop1.omega0},
                             {"omega_rf", r.spec.loop1.omega_rf}}},
              {"loop2", Json{{"omega1", r.spec.loop2.omega1},
                             {"omega0", r.spec.loop2.omega0},
                             {"omega_rf", r.spec.loop2.omega_rf}}},
              {"loop2_reversed", r.spec.loop2_reversed},
              {"sums", phase_sums_json(r.sums)},
              {"sums_doubled_steps", phase_sums_json(r.sums_doubled)},
              {"doubling_consistency", r.doubling_consistency},
              {"r_dyn_closed", r.r_dyn_closed},
              {"gamma_from_closed", r.gamma_from_closed},
              {"gamma_from_oracle", r.gamma_from_oracle},
              {"caption_gamma", r.caption_gamma},
              {"dynamical_nulled", r.dynamical_nulled},
              {"note", r.note}};
}

Json element_json(const PulseElement& e) {
  if (const auto* h = std::get_if<HardRotation>(&e)) {
    return Json{{"type", "hard"}, {"axis", vec3_json(h->axis)}, {"angle", h->angle},
                {"duration", h->duration}};
  }
  const auto& s = std::get<SoftEvolution>(e);
  return Json{{"type", "soft"},
              {"drive", lab_field_json(s.drive)},
              {"duration", s.duration},
              {"orientation", s.orientation == LoopOrientation::Loop1 ? "loop1" : "loop2_reversed"}};
}

Json sequence_json(const PulseSequence& seq) {
  Json elements = Json::array();
  for (const auto& e : seq.elements) elements.push_back(element_json(e));
  Json merged = Json::array();
  for (const auto& e : seq.merged) merged.push_back(element_json(e));
  Json j{{"gamma", seq.gamma},
         {"geometry", geometry_json(seq.geometry)},
         {"elements", elements},
         {"merged", merged}};
  if (seq.source_pair) {
    j["source_pair"] = Json{{"epsilon", seq.source_pair->epsilon},
                            {"omega0_tilde", seq.source_pair->omega0_tilde},
                            {"omega1_rf_tilde", seq.source_pair->omega1_rf_tilde},
                            {"omega2_rf_tilde", seq.source_pair->omega2_rf_tilde}};
  }
  return j;
}

Json gate_report_json(const GateReport& r) {
  return Json{{"sequence", sequence_json(r.sequence)},
              {"unitary", matrix_json(r.unitary)},
              {"closed_form", matrix_json(r.closed_form)},
              {"distance_closed_form", r.distance_closed_form},
              {"zw_gate", matrix_json(r.zw)},
              {"distance_zw", r.distance_zw}};
}

Json noise_json(const NoiseModel& n) {
  Json pts = Json::array();
  for (const auto& p : n.points) pts.push_back(Json{{"scale", p.scale}, {"weight", p.weight}});
  return Json{{"width", n.width}, {"points", pts}};
}

Json process_matrix_json(const ProcessMatrix& p) {
  return Json{{"chi", matrix_json(p.chi)},
              {"input_traces", p.input_traces},
              {"hermiticity_defect", p.hermiticity_defect}};
}

Json fidelity_report_json(const FidelityReport& r) {
  Json j{{"epsilon", r.epsilon},         {"gamma", r.gamma},
         {"fe_single", r.fe_single},     {"fe_double", r.fe_double},
         {"trace_single", r.trace_single}, {"trace_double", r.trace_double},
         {"noise_width", r.noise_width}};
  if (r.published) {
    j["published"] = Json{{"fe_single", r.published->fe_single},
                          {"trace_single", r.published->trace_single},
                          {"fe_double", r.published->fe_double},
                          {"trace_double", r.published->trace_double}};
  }
  return j;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& samples) {
  out << "t,nx,ny,nz\n";
  for (const auto& s : samples) {
    out << fixed9(s.t) << ',' << fixed9(s.n.x()) << ',' << fixed9(s.n.y()) << ','
        << fixed9(s.n.z()) << '\n';
  }
}

void write_surface_csv(std::ostream& out, const SurfaceMap& map) {
  out << "theta_in,phi_in,nx_in,ny_in,nz_in,nx_out,ny_out,nz_out\n";
  for (const auto& p : map.points) {
    out << fixed9(p.theta_in) << ',' << fixed9(p.phi_in);
    for (int k = 0; k < 3; ++k) out << ',' << fixed9(p.in(k));
    for (int k = 0; k < 3; ++k) out << ',' << fixed9(p.out(k));
    out << '\n';
  }
}

}  // namespace geogate
