#include "geogate/spin_dynamics.hpp"

#include <cmath>
#include <string>

#include "geogate/errors.hpp"

namespace geogate {
namespace {

constexpr double kMaxPhasePerStep = 0.5;

void check_step(double field_norm_bound, double duration, int steps, int min_steps) {
  if (steps < min_steps) {
    throw ToleranceUnreachable("at least " + std::to_string(min_steps) +
                               " integration steps are required");
  }
  const double h = duration / steps;
  if (0.5 * field_norm_bound * h > kMaxPhasePerStep) {
    throw ToleranceUnreachable("integration step too coarse for the field strength");
  }
}

// d psi / dt = (i/2) Omega(t).sigma psi
PureState rhs(const Vec3& field, const PureState& psi) {
  return 0.5 * kI * (dot_sigma(field) * psi);
}

double energy(const Vec3& field, const PureState& psi) {
  const Complex e = psi.dot(hamiltonian_of(field) * psi);
  return e.real() / psi.squaredNorm();
}

double field_bound(const LabField& f) { return std::hypot(f.omega1, f.omega0); }

}  // namespace

void LabField::validate() const {
  if (!std::isfinite(omega0) || !std::isfinite(omega1) || !std::isfinite(omega_rf) ||
      !std::isfinite(phi)) {
    throw InvalidArgument("field parameters must be finite");
  }
  if (omega1 < 0.0) throw InvalidArgument("omega1 must be non-negative");
  if (omega_rf == 0.0) throw InvalidArgument("omega_rf must be nonzero");
}

double LabField::period() const { return 2.0 * kPi / std::abs(omega_rf); }

Vec3 field_at(const LabField& f, double t) {
  const double a = f.omega_rf * t - f.phi;
  return Vec3(f.omega1 * std::cos(a), -f.omega1 * std::sin(a), f.omega0);
}

Operator2 hamiltonian_of(const Vec3& field) { return -0.5 * dot_sigma(field); }

Operator2 hamiltonian_at(const LabField& f, double t) { return hamiltonian_of(field_at(f, t)); }

RotatingFrame rotating_frame(const LabField& f) {
  f.validate();
  RotatingFrame r;
  r.delta = f.omega0 - f.omega_rf;
  r.omega_eff = std::hypot(f.omega1, r.delta);
  if (r.omega_eff == 0.0) throw DegenerateFrame("omega1 and detuning are both zero");
  r.chi = std::atan2(f.omega1, r.delta);
  r.m = Vec3(std::sin(r.chi) * std::cos(f.phi), std::sin(r.chi) * std::sin(f.phi),
             std::cos(r.chi));
  return r;
}

Operator2 propagator(const LabField& f, double t) {
  const RotatingFrame r = rotating_frame(f);
  // e^{i a sz/2} = rotation(z, -a); e^{i b m.sigma/2} = rotation(m, -b)
  return rotation(Vec3::UnitZ(), -f.omega_rf * t) * rotation(r.m, -r.omega_eff * t);
}

Operator2 numerical_propagator(const FieldFunction& field, double field_norm_bound,
                               double duration, int steps) {
  if (duration == 0.0) return identity2();
  check_step(field_norm_bound, duration, steps, 100);
  const double h = duration / steps;
  Operator2 u = identity2();
  auto a_of = [&](double t) { return Operator2(0.5 * kI * dot_sigma(field(t))); };
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Operator2 a0 = a_of(t);
    const Operator2 amid = a_of(t + 0.5 * h);
    const Operator2 a1 = a_of(t + h);
    const Operator2 k1 = a0 * u;
    const Operator2 k2 = amid * (u + 0.5 * h * k1);
    const Operator2 k3 = amid * (u + 0.5 * h * k2);
    const Operator2 k4 = a1 * (u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

Operator2 numerical_propagator(const LabField& f, double t, int steps) {
  f.validate();
  if (t < 0.0) throw InvalidArgument("time must be non-negative");
  return numerical_propagator([&f](double s) { return field_at(f, s); }, field_bound(f), t,
                              steps);
}

StateEvolution evolve_state(const FieldFunction& field, double field_norm_bound,
                            double duration, int steps, const PureState& psi0,
                            int sample_every) {
  if (steps % 2 != 0) ++steps;
  check_step(field_norm_bound, duration, steps, 100);
  const double h = duration / steps;

  StateEvolution out;
  PureState psi = psi0;
  double simpson = 0.0;
  Vec3 f0 = field(0.0);
  simpson += energy(f0, psi);
  auto record = [&](double t) {
    out.samples.push_back({t, bloch_of(DensityMatrix(psi * psi.adjoint() / psi.squaredNorm()))});
  };
  if (sample_every > 0) record(0.0);

  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Vec3 fmid = field(t + 0.5 * h);
    const Vec3 f1 = field(t + h);
    const PureState k1 = rhs(f0, psi);
    const PureState k2 = rhs(fmid, psi + 0.5 * h * k1);
    const PureState k3 = rhs(fmid, psi + 0.5 * h * k2);
    const PureState k4 = rhs(f1, psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    f0 = f1;

    const int index = k + 1;
    const double weight = (index == steps) ? 1.0 : (index % 2 == 1 ? 4.0 : 2.0);
    simpson += weight * energy(f1, psi);
    if (sample_every > 0 && (index % sample_every == 0 || index == steps)) record(t + h);
  }
  out.final_state = psi;
  out.dynamical_phase = -simpson * h / 3.0;
  return out;
}

std::pair<PureState, PureState> cyclic_states(const LabField& f) {
  const RotatingFrame r = rotating_frame(f);
  const Complex em = std::polar(1.0, -f.phi / 2.0);
  const Complex ep = std::polar(1.0, f.phi / 2.0);
  const double c = std::cos(r.chi / 2.0);
  const double s = std::sin(r.chi / 2.0);
  PureState plus(em * c, ep * s);
  PureState minus(-em * s, ep * c);
  return {plus, minus};
}

CyclicReport cyclic_report(const LabField& f) {
  const RotatingFrame r = rotating_frame(f);
  const double abs_rf = std::abs(f.omega_rf);
  const double sign_rf = f.omega_rf > 0.0 ? 1.0 : -1.0;

  CyclicReport rep;
  rep.tau = f.period();
  std::tie(rep.psi_plus, rep.psi_minus) = cyclic_states(f);

  const double ratio = r.omega_eff / abs_rf;
  const double dyn =
      kPi * (f.omega1 * f.omega1 + f.omega0 * r.delta) / (abs_rf * r.omega_eff);
  const double tilt = sign_rf * r.delta / r.omega_eff;

  rep.plus.total = kPi + kPi * ratio;
  rep.minus.total = kPi - kPi * ratio;
  rep.plus.dynamical = dyn;
  rep.minus.dynamical = -dyn;
  rep.plus.geometric = kPi * (1.0 - tilt);
  rep.minus.geometric = kPi * (1.0 + tilt);
  rep.plus.total_wrapped = wrap_pi(rep.plus.total);
  rep.minus.total_wrapped = wrap_pi(rep.minus.total);
  return rep;
}

double integrate_dynamical_phase(const LabField& f, Branch branch, int steps) {
  if (steps < 1000) {
    throw ToleranceUnreachable("dynamical-phase quadrature needs at least 1000 steps");
  }
  const auto [plus, minus] = cyclic_states(f);
  const PureState psi0 = branch == Branch::Plus ? plus : minus;
  return evolve_state([&f](double t) { return field_at(f, t); }, field_bound(f), f.period(),
                      steps, psi0)
      .dynamical_phase;
}

NumericPhases numeric_phases(const LabField& f, Branch branch, int steps) {
  if (steps < 1000) {
    throw ToleranceUnreachable("dynamical-phase quadrature needs at least 1000 steps");
  }
  const auto [plus, minus] = cyclic_states(f);
  const PureState psi0 = branch == Branch::Plus ? plus : minus;
  const StateEvolution ev = evolve_state([&f](double t) { return field_at(f, t); },
                                         field_bound(f), f.period(), steps, psi0);
  const Complex overlap = psi0.dot(ev.final_state);

  constexpr double kWindowShift = 1e-7;
  NumericPhases out;
  out.cyclicity = std::abs(overlap);
  out.dynamical = ev.dynamical_phase;
  double geo = std::arg(overlap) - ev.dynamical_phase;
  // reduce into (-shift, 2 pi - shift]
  geo = wrap_pi(geo - kPi + kWindowShift) + kPi - kWindowShift;
  out.geometric = geo;
  out.total = out.dynamical + out.geometric;
  return out;
}

Operator2 single_loop_gate(const LabField& f) {
  const RotatingFrame r = rotating_frame(f);
  const double gamma = cyclic_report(f).minus.total;
  const double cg = std::cos(gamma);
  const double sg = std::sin(gamma);
  const double cc = std::cos(r.chi);
  const double sc = std::sin(r.chi);
  Operator2 v;
  v << Complex(cg, -sg * cc), -kI * std::polar(1.0, -f.phi) * sg * sc,
      -kI * std::polar(1.0, f.phi) * sg * sc, Complex(cg, sg * cc);
  return v;
}

Eigen::MatrixXcd gate_from_cyclic_basis(std::span<const Eigen::VectorXcd> states,
                                        std::span<const double> phases) {
  if (states.empty() || states.size() != phases.size()) {
    throw InvalidArgument("need one phase per cyclic state");
  }
  const Eigen::Index n = states.front().size();
  if (static_cast<Eigen::Index>(states.size()) != n) {
    throw InvalidArgument("cyclic states must span the space");
  }
  for (std::size_t a = 0; a < states.size(); ++a) {
    if (states[a].size() != n) throw InvalidArgument("state dimensions differ");
    for (std::size_t b = a; b < states.size(); ++b) {
      const Complex g = states[a].dot(states[b]);
      const double expect = (a == b) ? 1.0 : 0.0;
      if (std::abs(g - expect) > 1e-9) throw InvalidArgument("cyclic states are not orthonormal");
    }
  }
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k < states.size(); ++k) {
    v += std::polar(1.0, phases[k]) * states[k] * states[k].adjoint();
  }
  return v;
}

Operator2 gate_from_cyclic_basis(const PureState& u0, const PureState& u1, double gamma0,
                                 double gamma1) {
  const std::vector<Eigen::VectorXcd> states{u0, u1};
  const std::vector<double> phases{gamma0, gamma1};
  return gate_from_cyclic_basis(states, phases);
}

std::vector<TrajectorySample> bloch_trajectory(const LabField& f, const PureState& psi0,
                                               double duration, int steps) {
  f.validate();
  if (steps < 1) throw InvalidArgument("trajectory needs at least one step");
  int sub = (kDefaultSteps + steps - 1) / steps;
  if ((sub * steps) % 2 != 0) sub *= 2;
  return evolve_state([&f](double t) { return field_at(f, t); }, field_bound(f), duration,
                      sub * steps, psi0, sub)
      .samples;
}

}  // namespace geogate
