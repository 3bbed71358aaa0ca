#include "geogate/double_loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "geogate/errors.hpp"

namespace geogate {
namespace {

constexpr double kConnectionTol = 1e-6;
constexpr double kWindowShift = 1e-7;
constexpr double kAcceptResidual = 1e-8;
constexpr double kCoarseResidual = 1e-9;

bool finite_drive(const LoopDrive& d) {
  return std::isfinite(d.omega0) && std::isfinite(d.omega1) && std::isfinite(d.omega_rf);
}

// Field of loop 2 before the tilt, written as a LabField: negation maps
// (w1, w0, phi) -> (w1, -w0, phi + pi).
LabField loop2_untilted(const GeneralLoopSpec& spec) {
  LabField f = spec.loop2.field();
  if (spec.loop2_reversed) {
    f.omega0 = -f.omega0;
    f.phi = kPi;
  }
  return f;
}

double geometric_window(double angle) {
  return wrap_pi(angle - kPi + kWindowShift) + kPi - kWindowShift;
}

double lower_chi(double omega1, double delta) { return std::atan2(omega1, delta) - kPi; }

double branch_chi(ChiBranch b, double omega1, double delta) {
  switch (b) {
    case ChiBranch::Lower:
      return lower_chi(omega1, delta);
    case ChiBranch::Upper:
      return std::atan2(omega1, delta);
    case ChiBranch::Principal:
      return delta == 0.0 ? kPi / 2.0 : std::atan(omega1 / delta);
  }
  return 0.0;
}

double rel_dev(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

struct Trial {
  double x1 = 0.0;
  double x2 = 0.0;
  double norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

class ResidualMap {
 public:
  ResidualMap(double epsilon, double gamma, double omega0_tilde)
      : epsilon_(epsilon), gamma_(gamma), omega0_(omega0_tilde) {}

  NmrLoopPair pair(double x1, double x2) const {
    NmrLoopPair p;
    p.omega0_tilde = omega0_;
    p.epsilon = epsilon_;
    p.omega1_rf_tilde = x1;
    p.omega2_rf_tilde = x2;
    p.gamma = gamma_;
    return p;
  }

  Eigen::Vector2d operator()(double x1, double x2, int steps) const {
    const PhaseSums s = phase_sums_oracle(pair(x1, x2).to_general(), steps);
    return {s.dynamical, wrap_pi(s.geometric - gamma_ * kPi)};
  }

 private:
  double epsilon_;
  double gamma_;
  double omega0_;
};

// Damped Newton inside the sign quadrant of the start point.
Trial newton(const ResidualMap& map, double x1, double x2, int steps, double tol,
             int max_iterations, double scale) {
  const double lo = 0.01 * scale;
  const double hi = 50.0 * scale;
  auto admissible = [&](double a, double ref) {
    return std::signbit(a) == std::signbit(ref) && std::abs(a) >= lo && std::abs(a) <= hi;
  };

  Trial t{x1, x2};
  Eigen::Vector2d r = map(x1, x2, steps);
  t.norm = r.norm();
  for (int it = 0; it < max_iterations && r.cwiseAbs().maxCoeff() > tol; ++it) {
    t.iterations = it + 1;
    Eigen::Matrix2d jac;
    const double h1 = 1e-6 * std::max(std::abs(t.x1), 0.05 * scale);
    const double h2 = 1e-6 * std::max(std::abs(t.x2), 0.05 * scale);
    jac.col(0) = (map(t.x1 + h1, t.x2, steps) - map(t.x1 - h1, t.x2, steps)) / (2.0 * h1);
    jac.col(1) = (map(t.x1, t.x2 + h2, steps) - map(t.x1, t.x2 - h2, steps)) / (2.0 * h2);
    const double det = jac.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) break;
    const Eigen::Vector2d delta = -jac.inverse() * r;

    bool accepted = false;
    double lambda = 1.0;
    for (int halving = 0; halving < 30; ++halving, lambda *= 0.5) {
      const double n1 = t.x1 + lambda * delta(0);
      const double n2 = t.x2 + lambda * delta(1);
      if (!admissible(n1, t.x1) || !admissible(n2, t.x2)) continue;
      const Eigen::Vector2d rn = map(n1, n2, steps);
      if (rn.norm() < r.norm()) {
        t.x1 = n1;
        t.x2 = n2;
        r = rn;
        accepted = true;
        break;
      }
    }
    t.norm = r.norm();
    if (!accepted) break;
  }
  t.norm = r.cwiseAbs().maxCoeff();
  return t;
}

}  // namespace

void GeneralLoopSpec::validate() const {
  for (const LoopDrive* d : {&loop1, &loop2}) {
    if (!finite_drive(*d)) throw InvalidArgument("loop parameters must be finite");
    if (d->omega1 < 0.0) throw InvalidArgument("loop amplitude must be non-negative");
    if (d->omega_rf == 0.0) throw InvalidArgument("loop rf frequency must be nonzero");
  }
}

void NmrLoopPair::validate() const {
  if (!std::isfinite(omega0_tilde) || !(omega0_tilde < 0.0)) {
    throw InvalidArgument("omega0_tilde must be negative");
  }
  if (!std::isfinite(epsilon) || !(epsilon > 0.0)) {
    throw InvalidArgument("epsilon must be positive");
  }
  if (!std::isfinite(omega1_rf_tilde) || !std::isfinite(omega2_rf_tilde) ||
      omega1_rf_tilde == 0.0 || omega2_rf_tilde == 0.0) {
    throw InvalidArgument("rf frequencies must be finite and nonzero");
  }
  if (std::signbit(omega1_rf_tilde) == std::signbit(omega2_rf_tilde)) {
    throw InvalidArgument("rf frequencies of the two loops must have opposite signs");
  }
  if (!std::isfinite(gamma)) throw InvalidArgument("gamma must be finite");
}

LabField NmrLoopPair::loop1_field() const {
  return LabField{omega0_tilde, omega1(), omega1_rf_tilde, 0.0};
}

LabField NmrLoopPair::loop2_field() const {
  return LabField{omega0_tilde, omega1(), omega2_rf_tilde, 0.0};
}

GeneralLoopSpec NmrLoopPair::to_general() const {
  validate();
  GeneralLoopSpec s;
  s.loop1 = LoopDrive{omega1(), omega0_tilde, omega1_rf_tilde};
  // R_y(pi) D(t) R_y(-pi) equals the negated drive at rf -omega2_rf_tilde.
  s.loop2 = LoopDrive{omega1(), omega0_tilde, -omega2_rf_tilde};
  s.loop2_reversed = true;
  return s;
}

LoopGeometry geometry_of(const GeneralLoopSpec& spec) {
  spec.validate();
  LoopGeometry g;
  g.delta1 = spec.loop1.omega0 - spec.loop1.omega_rf;
  g.delta2 = spec.loop2_reversed ? spec.loop2.omega0 + spec.loop2.omega_rf
                                 : spec.loop2.omega0 - spec.loop2.omega_rf;
  g.omega1_eff = std::hypot(spec.loop1.omega1, g.delta1);
  g.omega2_eff = std::hypot(spec.loop2.omega1, g.delta2);
  if (g.omega1_eff == 0.0 || g.omega2_eff == 0.0) {
    throw DegenerateFrame("a loop has zero effective field in its rotating frame");
  }
  g.chi1 = lower_chi(spec.loop1.omega1, g.delta1);
  g.chi2 = lower_chi(spec.loop2.omega1, g.delta2);
  g.theta = g.chi2 - g.chi1;
  g.Theta = 0.5 * (g.chi1 + g.chi2);
  return g;
}

LoopGeometry geometry_of(const NmrLoopPair& pair) { return geometry_of(pair.to_general()); }

FieldFunction loop2_lab_field(const GeneralLoopSpec& spec, const LoopGeometry& geometry) {
  const LabField f = loop2_untilted(spec);
  const Eigen::Matrix3d tilt = so3_rotation_y(-geometry.theta);
  return [f, tilt](double t) -> Vec3 { return tilt * field_at(f, t); };
}

Branch connection_branch(const GeneralLoopSpec& spec, double theta) {
  const Vec3 m1 = rotating_frame(spec.loop1.field()).m;
  const Vec3 m2 = so3_rotation_y(-theta) * rotating_frame(loop2_untilted(spec)).m;
  const bool parallel = m1.dot(m2) > 0.0;
  const Vec3 gap = parallel ? Vec3(m1 - m2) : Vec3(m1 + m2);
  if (gap.norm() > kConnectionTol) {
    throw ConventionError("loop-2 cyclic axis does not meet the loop-1 axis");
  }
  return parallel ? Branch::Plus : Branch::Minus;
}

PhaseSums phase_sums_oracle(const GeneralLoopSpec& spec, int steps) {
  const LoopGeometry g = geometry_of(spec);
  PhaseSums out;
  out.loop2_branch = connection_branch(spec, g.theta);

  const LabField f1 = spec.loop1.field();
  const LabField f2 = loop2_untilted(spec);
  const PureState psi0 = cyclic_states(f1).first;

  const StateEvolution e1 =
      evolve_state([&f1](double t) { return field_at(f1, t); },
                   std::hypot(f1.omega1, f1.omega0), f1.period(), steps, psi0);
  const StateEvolution e2 = evolve_state(loop2_lab_field(spec, g),
                                         std::hypot(f2.omega1, f2.omega0), f2.period(), steps,
                                         e1.final_state);

  out.dynamical_loop1 = e1.dynamical_phase;
  out.dynamical_loop2 = e2.dynamical_phase;
  out.geometric_loop1 = geometric_window(std::arg(psi0.dot(e1.final_state)) - e1.dynamical_phase);
  out.geometric_loop2 = geometric_window(std::arg(e1.final_state.dot(e2.final_state)) -
                                         e2.dynamical_phase);
  out.dynamical = out.dynamical_loop1 + out.dynamical_loop2;
  out.geometric = out.geometric_loop1 + out.geometric_loop2;
  out.cyclicity = std::abs(psi0.dot(e2.final_state));
  return out;
}

PhaseSums phase_sums_oracle(const NmrLoopPair& pair, int steps) {
  return phase_sums_oracle(pair.to_general(), steps);
}

PhaseSums phase_sums_closed(const GeneralLoopSpec& spec) {
  const LoopGeometry g = geometry_of(spec);
  PhaseSums out;
  out.loop2_branch = connection_branch(spec, g.theta);
  const CyclicReport r1 = cyclic_report(spec.loop1.field());
  const CyclicReport r2 = cyclic_report(loop2_untilted(spec));
  const BranchPhases& p2 = r2.phases(out.loop2_branch);
  out.dynamical_loop1 = r1.plus.dynamical;
  out.geometric_loop1 = r1.plus.geometric;
  out.dynamical_loop2 = p2.dynamical;
  out.geometric_loop2 = p2.geometric;
  out.dynamical = out.dynamical_loop1 + out.dynamical_loop2;
  out.geometric = out.geometric_loop1 + out.geometric_loop2;
  out.cyclicity = 1.0;
  return out;
}

Residuals residuals(const GeneralLoopSpec& spec, double gamma, int steps) {
  const LoopGeometry g = geometry_of(spec);
  const PhaseSums oracle = phase_sums_oracle(spec, steps);
  const PhaseSums closed = phase_sums_closed(spec);
  Residuals r;
  r.r_dyn = oracle.dynamical;
  r.r_geo = wrap_pi(oracle.geometric - gamma * kPi);
  const double w11 = spec.loop1.omega1;
  const double w21 = spec.loop2.omega1;
  r.r_dyn_closed = (w11 * w11 + spec.loop1.omega0 * g.delta1) / g.omega1_eff -
                   (w21 * w21 + spec.loop2.omega0 * g.delta2) / g.omega2_eff;
  r.r_geo_closed = g.delta1 / g.omega1_eff + g.delta2 / g.omega2_eff - (2.0 - gamma);
  r.dyn_sum_closed = closed.dynamical;
  r.geo_sum_closed = closed.geometric;
  return r;
}

Residuals residuals(const NmrLoopPair& pair, int steps) {
  return residuals(pair.to_general(), pair.gamma, steps);
}

std::string ReportingConvention::id() const {
  std::string s = rf_sign > 0 ? "rf+" : "rf-";
  switch (branch) {
    case ChiBranch::Lower:
      s += "/chi-lower";
      break;
    case ChiBranch::Upper:
      s += "/chi-upper";
      break;
    case ChiBranch::Principal:
      s += "/chi-atan";
      break;
  }
  s += theta_sign > 0 ? "/theta+" : "/theta-";
  return s;
}

std::vector<ReportingConvention> enumerate_conventions() {
  std::vector<ReportingConvention> out;
  for (int rf : {1, -1}) {
    for (ChiBranch b : {ChiBranch::Lower, ChiBranch::Upper, ChiBranch::Principal}) {
      for (int th : {1, -1}) out.push_back({rf, b, th});
    }
  }
  return out;
}

ReportingConvention table_convention() { return {-1, ChiBranch::Lower, -1}; }

ReportedSolution report_under(const NmrLoopPair& pair, const ReportingConvention& c) {
  const LoopGeometry g = geometry_of(pair);
  const double w1 = pair.omega1();
  const double chi1 = branch_chi(c.branch, w1, g.delta1);
  const double chi2 = branch_chi(c.branch, w1, g.delta2);
  ReportedSolution r;
  r.ratio1 = c.rf_sign * pair.omega1_rf_tilde / pair.omega0_tilde;
  r.ratio2 = c.rf_sign * pair.omega2_rf_tilde / pair.omega0_tilde;
  r.theta = c.theta_sign * (chi2 - chi1);
  r.Theta = 0.5 * (chi1 + chi2);
  return r;
}

SolvedPair solve(double epsilon, double gamma, double omega0_tilde, const SolveOptions& options) {
  if (!std::isfinite(epsilon) || epsilon < 0.0 || epsilon > 2.0) {
    throw InvalidArgument("epsilon must lie in (0, 2]");
  }
  if (!std::isfinite(gamma) || !(gamma > 0.0) || !(gamma < 2.0)) {
    throw InvalidArgument("gamma must lie in (0, 2)");
  }
  if (!std::isfinite(omega0_tilde) || !(omega0_tilde < 0.0)) {
    throw InvalidArgument("omega0_tilde must be negative");
  }
  if (epsilon == 0.0) {
    throw SolverFailure("zero transverse field gives no geometric-phase control",
                        std::numeric_limits<double>::infinity());
  }
  if (options.steps < 1000 || options.coarse_steps < 1000) {
    throw ToleranceUnreachable("solver needs at least 1000 steps per loop");
  }

  const double scale = std::abs(omega0_tilde);
  const ResidualMap map(epsilon, gamma, omega0_tilde);

  struct Start {
    double x1;
    double x2;
    int index;
  };
  std::vector<Start> starts;
  if (options.guess) {
    starts.push_back({options.guess->first * omega0_tilde, options.guess->second * omega0_tilde,
                      -1});
  }
  constexpr int kGrid = 8;
  std::array<double, kGrid> mags{};
  for (int k = 0; k < kGrid; ++k) {
    mags[k] = 0.05 * std::pow(2.0 / 0.05, static_cast<double>(k) / (kGrid - 1)) * scale;
  }
  int index = 0;
  for (int pattern = 0; pattern < 2; ++pattern) {
    const double s1 = pattern == 0 ? -1.0 : 1.0;
    for (int a = 0; a < kGrid; ++a) {
      for (int b = 0; b < kGrid; ++b) starts.push_back({s1 * mags[a], -s1 * mags[b], index++});
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const Start& st : starts) {
    if (st.x1 == 0.0 || st.x2 == 0.0 || std::signbit(st.x1) == std::signbit(st.x2)) {
      if (st.index < 0) throw InvalidArgument("guess must have opposite rf signs");
      continue;
    }
    Trial coarse;
    try {
      coarse = newton(map, st.x1, st.x2, options.coarse_steps, kCoarseResidual,
                      options.max_iterations, scale);
    } catch (const ToleranceUnreachable&) {
      continue;
    }
    best = std::min(best, coarse.norm);
    if (!(coarse.norm <= kCoarseResidual)) continue;
    const Trial fine = newton(map, coarse.x1, coarse.x2, options.steps, options.tolerance,
                              options.max_iterations, scale);
    best = std::min(best, fine.norm);
    if (!(fine.norm <= kAcceptResidual)) continue;

    SolvedPair out;
    out.pair = map.pair(fine.x1, fine.x2);
    out.geometry = geometry_of(out.pair);
    out.residuals = residuals(out.pair, options.steps);
    out.convention_id = table_convention().id();
    out.start_index = st.index;
    out.iterations = coarse.iterations + fine.iterations;
    return out;
  }
  std::ostringstream msg;
  msg << "no root found for epsilon=" << epsilon << " gamma=" << gamma << " (best residual "
      << best << ")";
  throw SolverFailure(msg.str(), best);
}

const std::array<std::pair<double, ReportedSolution>, 3>& published_table1() {
  static const std::array<std::pair<double, ReportedSolution>, 3> rows{{
      {0.5, {-0.6815, 0.7803, -0.7298, -0.639}},
      {0.3, {-0.8221, 1.105, -0.9571, -0.589}},
      {0.1, {-0.9422, 1.609, -1.008, -0.542}},
  }};
  return rows;
}

namespace {

Table1Entry compare_row(double epsilon, const ReportedSolution& published, const NmrLoopPair& pair,
                        const ReportingConvention& c) {
  Table1Entry e;
  e.epsilon = epsilon;
  e.published = published;
  e.solved = report_under(pair, c);
  e.deviation = {rel_dev(e.solved.ratio1, published.ratio1), rel_dev(e.solved.ratio2, published.ratio2),
                 rel_dev(e.solved.theta, published.theta), rel_dev(e.solved.Theta, published.Theta)};
  e.match = e.deviation[0] <= kRatioTolerance && e.deviation[1] <= kRatioTolerance &&
            e.deviation[2] <= kAngleTolerance && e.deviation[3] <= kAngleTolerance;
  if (!e.match) {
    std::ostringstream note;
    const char* names[] = {"ratio1", "ratio2", "theta", "Theta"};
    const double tols[] = {kRatioTolerance, kRatioTolerance, kAngleTolerance, kAngleTolerance};
    bool first = true;
    for (int k = 0; k < 4; ++k) {
      if (e.deviation[k] > tols[k]) {
        note << (first ? "" : "; ") << names[k] << " off by " << e.deviation[k] * 100.0 << "%";
        first = false;
      }
    }
    e.note = note.str();
  }
  return e;
}

}  // namespace

Table1Report table1_report(const SolveOptions& options) {
  Table1Report rep;
  for (const auto& [eps, published] : published_table1()) {
    rep.solutions.push_back(solve(eps, 0.5, -1.0, options));
  }

  const auto conventions = enumerate_conventions();
  int best = -1;
  for (std::size_t k = 0; k < conventions.size(); ++k) {
    ConventionScore score{conventions[k]};
    for (std::size_t row = 0; row < rep.solutions.size(); ++row) {
      const auto& [eps, published] = published_table1()[row];
      const Table1Entry e = compare_row(eps, published, rep.solutions[row].pair, conventions[k]);
      if (e.match) ++score.rows_matched;
      for (double d : e.deviation) score.worst_deviation = std::max(score.worst_deviation, d);
    }
    rep.scores.push_back(score);
    if (best < 0 || score.rows_matched > rep.scores[best].rows_matched ||
        (score.rows_matched == rep.scores[best].rows_matched &&
         score.worst_deviation < rep.scores[best].worst_deviation)) {
      best = static_cast<int>(k);
    }
  }
  rep.convention = conventions[best];
  for (std::size_t row = 0; row < rep.solutions.size(); ++row) {
    const auto& [eps, published] = published_table1()[row];
    rep.rows.push_back(compare_row(eps, published, rep.solutions[row].pair, rep.convention));
  }
  rep.all_rows_match = rep.scores[best].rows_matched == static_cast<int>(rep.solutions.size());

  std::ostringstream s;
  if (rep.all_rows_match) {
    s << "all rows reproduced under convention " << rep.convention.id();
  } else {
    s << "discrepancy: best convention " << rep.convention.id() << " matches "
      << rep.scores[best].rows_matched << " of " << rep.solutions.size() << " rows;";
    for (const auto& e : rep.rows) {
      if (!e.match) s << " epsilon=" << e.epsilon << ": " << e.note << ".";
    }
    s << " The solver residuals remain the ground truth.";
  }
  rep.summary = s.str();
  return rep;
}

GeneralLoopSpec fig3_spec() {
  GeneralLoopSpec s;
  s.loop1 = LoopDrive{2.0 * kPi, 0.27 * 2.0 * kPi, 0.7 * 2.0 * kPi};
  s.loop2 = LoopDrive{2.0 * kPi, 1.5 * 2.0 * kPi, 0.7 * 2.0 * kPi};
  s.loop2_reversed = true;
  return s;
}

Fig3Report fig3_report(int steps) {
  Fig3Report rep;
  rep.spec = fig3_spec();
  rep.sums = phase_sums_oracle(rep.spec, steps);
  rep.sums_doubled = phase_sums_oracle(rep.spec, 2 * steps);
  const LoopGeometry g = geometry_of(rep.spec);
  const Residuals r = residuals(rep.spec, rep.caption_gamma, steps);
  rep.r_dyn_closed = r.r_dyn_closed;
  rep.gamma_from_closed = 2.0 - (g.delta1 / g.omega1_eff + g.delta2 / g.omega2_eff);
  double gamma = std::fmod(rep.sums.geometric / kPi, 2.0);
  if (gamma <= 0.0) gamma += 2.0;
  rep.gamma_from_oracle = gamma;
  rep.dynamical_nulled = std::abs(rep.sums.dynamical) <= 1e-6;
  rep.doubling_consistency =
      std::max(std::abs(rep.sums.dynamical - rep.sums_doubled.dynamical),
               std::abs(wrap_pi(rep.sums.geometric - rep.sums_doubled.geometric)));

  std::ostringstream note;
  note.precision(6);
  note << "oracle dynamical sum " << rep.sums.dynamical << " rad ("
       << rep.sums.dynamical / kPi << " pi); ";
  if (rep.dynamical_nulled) {
    note << "agrees with the caption's cancellation claim; ";
  } else {
    note << "discrepancy: the listed parameters do not cancel the dynamical phase; ";
  }
  note << "literal common-rf dynamical residual " << rep.r_dyn_closed << "; geometric sum "
       << rep.sums.geometric / kPi << " pi, i.e. Gamma = " << rep.gamma_from_oracle
       << " (mod 2) versus caption Gamma = " << rep.caption_gamma
       << "; closed-form geometric condition gives Gamma = " << rep.gamma_from_closed
       << "; step-doubling change " << rep.doubling_consistency << ".";
  rep.note = note.str();
  return rep;
}

}  // namespace geogate
