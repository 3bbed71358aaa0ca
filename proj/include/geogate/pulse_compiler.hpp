#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "geogate/double_loop.hpp"

namespace geogate {

/// Hard-pulse length 21.6 us at |omega0_tilde| = 2 pi x 1 kHz, in units of 1/|omega0_tilde|.
inline constexpr double kHardPulseDuration = 21.6e-6 * 2.0 * kPi * 1000.0;

struct HardRotation {
  Vec3 axis = Vec3::UnitY();
  double angle = 0.0;
  double duration = 0.0;  // 0 = ideal
};

enum class LoopOrientation { Loop1, Loop2Reversed };

struct SoftEvolution {
  LabField drive;
  double duration = 0.0;
  LoopOrientation orientation = LoopOrientation::Loop1;
};

using PulseElement = std::variant<HardRotation, SoftEvolution>;

struct PulseSequence {
  std::vector<PulseElement> elements;  // application order
  std::vector<PulseElement> merged;    // theta and pi pulses combined
  std::optional<NmrLoopPair> source_pair;
  std::optional<GeneralLoopSpec> source_spec;
  double gamma = 0.0;
  LoopGeometry geometry;
  double offset = 0.0;  // static z field seen during finite hard pulses
};

/// [Soft(loop 1), Hard(y, theta), Hard(y, pi), Soft(loop-2 drive), Hard(y, -pi)].
/// Throws InvalidArgument if the pair's residuals exceed 1e-8.
PulseSequence compile_echo(const SolvedPair& solved);
PulseSequence compile_echo(const GeneralLoopSpec& spec, double gamma);

struct SequenceOptions {
  double amplitude_scale = 1.0;  // multiplies soft-drive omega1 and hard-pulse angles
  bool finite_hard_pulses = false;
  double hard_pulse_duration = kHardPulseDuration;
  bool use_merged = false;
};

Operator2 element_unitary(const PulseElement& e, const SequenceOptions& options = {},
                          double offset = 0.0);
Operator2 sequence_unitary(const PulseSequence& seq, const SequenceOptions& options = {});
Operator2 sequence_unitary(const std::vector<PulseElement>& elements,
                           const SequenceOptions& options = {}, double offset = 0.0);

/// [[cG c - i sG cT, -cG s - i sG sT], [cG s - i sG sT, cG c + i sG cT]] with
/// cG = cos(Gamma pi), c = cos(theta/2), cT = cos(Theta) and so on.
Operator2 closed_form_echo(const LoopGeometry& geometry, double gamma);
Operator2 closed_form_echo(double theta, double Theta, double gamma);

/// e^{i Gamma pi}|psi_1+><psi_1+| + e^{-i Gamma pi}|psi_1-><psi_1-| on loop 1's cyclic states.
Operator2 zw_gate(const GeneralLoopSpec& spec, double gamma);
Operator2 zw_gate(const NmrLoopPair& pair, double gamma);

/// -i [[cos Theta, sin Theta], [sin Theta, -cos Theta]].
Operator2 gamma_half_gate(double Theta);

Operator2 hadamard();

struct HadamardComparison {
  double distance_to_hadamard = 0.0;
  double distance_to_z_hadamard_z = 0.0;
  std::string note;
};

/// Compares gamma_half_gate(Theta) with H and sigma_z H sigma_z up to global phase.
HadamardComparison hadamard_equivalence(double Theta);

}  // namespace geogate
