#include "geogate/pulse_compiler.hpp"

#include <cmath>
#include <sstream>

#include "geogate/errors.hpp"

namespace geogate {
namespace {

constexpr double kSolvedTolerance = 1e-8;

// Drive D with R_y(pi) D(t) R_y(-pi) equal to loop 2's untilted (negated) field.
LabField echo_drive(const GeneralLoopSpec& spec) {
  LabField f = spec.loop2.field();
  if (spec.loop2_reversed) {
    f.omega0 = -f.omega0;
    f.phi = kPi;
  }
  return LabField{-f.omega0, f.omega1, -f.omega_rf, wrap_pi(-kPi - f.phi)};
}

PulseSequence build(const GeneralLoopSpec& spec, double gamma) {
  PulseSequence seq;
  seq.geometry = geometry_of(spec);
  seq.gamma = gamma;
  seq.source_spec = spec;
  seq.offset = spec.loop1.omega0;

  const LabField f1 = spec.loop1.field();
  const LabField d = echo_drive(spec);
  const SoftEvolution soft1{f1, f1.period(), LoopOrientation::Loop1};
  const SoftEvolution soft2{d, d.period(), LoopOrientation::Loop2Reversed};
  const Vec3 y = Vec3::UnitY();

  seq.elements = {soft1, HardRotation{y, seq.geometry.theta}, HardRotation{y, kPi}, soft2,
                  HardRotation{y, -kPi}};
  seq.merged = {soft1, HardRotation{y, seq.geometry.theta + kPi}, soft2, HardRotation{y, -kPi}};
  return seq;
}

}  // namespace

PulseSequence compile_echo(const SolvedPair& solved) {
  const Residuals& r = solved.residuals;
  if (!(std::abs(r.r_dyn) <= kSolvedTolerance) || !(std::abs(r.r_geo) <= kSolvedTolerance)) {
    throw InvalidArgument("pair is not solved: residuals exceed 1e-8");
  }
  PulseSequence seq = build(solved.pair.to_general(), solved.pair.gamma);
  seq.source_pair = solved.pair;
  return seq;
}

PulseSequence compile_echo(const GeneralLoopSpec& spec, double gamma) {
  if (!std::isfinite(gamma)) throw InvalidArgument("gamma must be finite");
  return build(spec, gamma);
}

Operator2 element_unitary(const PulseElement& e, const SequenceOptions& options, double offset) {
  const double s = options.amplitude_scale;
  if (const auto* h = std::get_if<HardRotation>(&e)) {
    const double angle = s * h->angle;
    const double duration = options.finite_hard_pulses ? options.hard_pulse_duration : h->duration;
    if (duration <= 0.0) return rotation(h->axis, angle);
    // Constant field F: exp(i t F.sigma / 2) = rotation(F/|F|, -|F| t).
    const Vec3 field = -(h->angle / duration) * s * h->axis + offset * Vec3::UnitZ();
    const double norm = field.norm();
    if (norm == 0.0) return identity2();
    return rotation(field / norm, -norm * duration);
  }
  const auto& soft = std::get<SoftEvolution>(e);
  LabField f = soft.drive;
  f.omega1 *= std::abs(s);
  if (s < 0.0) f.phi = wrap_pi(f.phi + kPi);
  return propagator(f, soft.duration);
}

Operator2 sequence_unitary(const std::vector<PulseElement>& elements,
                           const SequenceOptions& options, double offset) {
  Operator2 u = identity2();
  for (const auto& e : elements) u = element_unitary(e, options, offset) * u;
  return u;
}

Operator2 sequence_unitary(const PulseSequence& seq, const SequenceOptions& options) {
  return sequence_unitary(options.use_merged ? seq.merged : seq.elements, options, seq.offset);
}

Operator2 closed_form_echo(double theta, double Theta, double gamma) {
  const double cg = std::cos(gamma * kPi);
  const double sg = std::sin(gamma * kPi);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const double cT = std::cos(Theta);
  const double sT = std::sin(Theta);
  Operator2 u;
  u << Complex(cg * c, -sg * cT), Complex(-cg * s, -sg * sT), Complex(cg * s, -sg * sT),
      Complex(cg * c, sg * cT);
  return u;
}

Operator2 closed_form_echo(const LoopGeometry& geometry, double gamma) {
  return closed_form_echo(geometry.theta, geometry.Theta, gamma);
}

Operator2 zw_gate(const GeneralLoopSpec& spec, double gamma) {
  spec.validate();
  const auto [plus, minus] = cyclic_states(spec.loop1.field());
  return gate_from_cyclic_basis(plus, minus, gamma * kPi, -gamma * kPi);
}

Operator2 zw_gate(const NmrLoopPair& pair, double gamma) {
  return zw_gate(pair.to_general(), gamma);
}

Operator2 gamma_half_gate(double Theta) {
  Operator2 m;
  m << std::cos(Theta), std::sin(Theta), std::sin(Theta), -std::cos(Theta);
  return -kI * m;
}

Operator2 hadamard() {
  Operator2 h;
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

HadamardComparison hadamard_equivalence(double Theta) {
  const Operator2 g = gamma_half_gate(Theta);
  const Operator2 h = hadamard();
  const Operator2 z = pauli(3);
  HadamardComparison out;
  out.distance_to_hadamard = distance_up_to_global_phase(g, h);
  out.distance_to_z_hadamard_z = distance_up_to_global_phase(g, z * h * z);
  std::ostringstream note;
  if (out.distance_to_hadamard <= 1e-9) {
    note << "equals the Hadamard gate up to global phase";
  } else if (out.distance_to_z_hadamard_z <= 1e-9) {
    note << "equals sigma_z H sigma_z up to global phase, not H itself; Theta = pi/4 gives H";
  } else {
    note << "not Hadamard-equivalent (distance " << out.distance_to_hadamard << ")";
  }
  out.note = note.str();
  return out;
}

}  // namespace geogate
