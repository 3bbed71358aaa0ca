#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "geogate/quantum_core.hpp"

namespace geogate {

// RK4 steps per loop used by the numerical oracles unless a caller overrides it.
inline constexpr int kDefaultSteps = 20000;

/// Rotating drive Omega(t) = (w1 cos(w_rf t - phi), -w1 sin(w_rf t - phi), w0),
/// entering the Hamiltonian as H(t) = -Omega(t).sigma / 2 (hbar = 1).
struct LabField {
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega_rf = 1.0;
  double phi = 0.0;

  void validate() const;
  double period() const;  // 2 pi / |omega_rf|
};

struct RotatingFrame {
  double delta = 0.0;      // omega0 - omega_rf
  double omega_eff = 0.0;  // sqrt(omega1^2 + delta^2)
  double chi = 0.0;        // atan2(omega1, delta), in [0, pi]
  Vec3 m = Vec3::UnitZ();  // (sin chi cos phi, sin chi sin phi, cos chi)
};

enum class Branch { Plus, Minus };

struct BranchPhases {
  double total = 0.0;          // pi +- pi Omega / |w_rf|, not reduced
  double total_wrapped = 0.0;  // same, in (-pi, pi]
  double dynamical = 0.0;
  double geometric = 0.0;      // in [0, 2 pi]
};

struct CyclicReport {
  double tau = 0.0;
  PureState psi_plus;
  PureState psi_minus;
  BranchPhases plus;
  BranchPhases minus;

  const BranchPhases& phases(Branch b) const { return b == Branch::Plus ? plus : minus; }
};

using FieldFunction = std::function<Vec3(double)>;

struct TrajectorySample {
  double t = 0.0;
  BlochVector n = BlochVector::Zero();
};

struct StateEvolution {
  PureState final_state;
  double dynamical_phase = 0.0;  // -int <psi|H|psi> dt, composite Simpson
  std::vector<TrajectorySample> samples;
};

Vec3 field_at(const LabField& f, double t);
Operator2 hamiltonian_of(const Vec3& field);
Operator2 hamiltonian_at(const LabField& f, double t);

/// Throws DegenerateFrame when omega1 and the detuning both vanish.
RotatingFrame rotating_frame(const LabField& f);

/// Closed form e^{i w_rf t sz/2} e^{i Omega t m.sigma/2}.
Operator2 propagator(const LabField& f, double t);

/// Fixed-step RK4 integration of i dU/dt = H(t) U. Needs steps >= 100 and a step
/// small enough for the field strength, otherwise ToleranceUnreachable.
Operator2 numerical_propagator(const LabField& f, double t, int steps = kDefaultSteps);
Operator2 numerical_propagator(const FieldFunction& field, double field_norm_bound,
                               double duration, int steps);

/// RK4 along the state with the dynamical phase accumulated by composite Simpson
/// on the same grid. An odd step count is rounded up. When sample_every > 0 the
/// Bloch vector is recorded every sample_every steps (and at the end).
StateEvolution evolve_state(const FieldFunction& field, double field_norm_bound,
                            double duration, int steps, const PureState& psi0,
                            int sample_every = 0);

/// Eigenstates of m.sigma with eigenvalues +1 / -1 in the explicit half-angle form.
std::pair<PureState, PureState> cyclic_states(const LabField& f);

CyclicReport cyclic_report(const LabField& f);

/// -int_0^tau <psi(t)|H(t)|psi(t)> dt along the RK4-propagated cyclic state.
double integrate_dynamical_phase(const LabField& f, Branch branch, int steps = kDefaultSteps);

/// Unwrapped total phase of a cyclic state from numerics: the integrated
/// dynamical phase plus the remaining overlap phase reduced into the window
/// (-1e-7, 2 pi - 1e-7], which is where the closed-form geometric phase lives.
struct NumericPhases {
  double total = 0.0;
  double dynamical = 0.0;
  double geometric = 0.0;
  double cyclicity = 0.0;  // |<psi(0)|psi(tau)>|
};
NumericPhases numeric_phases(const LabField& f, Branch branch, int steps = kDefaultSteps);

/// V(tau) built from the closed-form gamma_- and chi, phi.
Operator2 single_loop_gate(const LabField& f);

/// V_{ll'} = sum_k e^{i gamma_k} <l|u_k><u_k|l'>. Throws InvalidArgument if the
/// states are not orthonormal within 1e-9 or the counts differ.
Eigen::MatrixXcd gate_from_cyclic_basis(std::span<const Eigen::VectorXcd> states,
                                        std::span<const double> phases);
Operator2 gate_from_cyclic_basis(const PureState& u0, const PureState& u1, double gamma0,
                                 double gamma1);

/// Bloch trajectory of psi0 under f over [0, duration], steps + 1 rows.
std::vector<TrajectorySample> bloch_trajectory(const LabField& f, const PureState& psi0,
                                               double duration, int steps);

}  // namespace geogate
