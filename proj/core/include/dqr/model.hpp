#pragma once

#include <optional>

namespace dqr {

// Resonator, qubit, coupling and leakage of one device. Angular units throughout.
struct DeviceParams {
  double omega_r = 0.0;    // resonator frequency, rad/s
  double omega_q = 0.0;    // qubit transition frequency, rad/s
  double g = 0.0;          // qubit-resonator coupling, rad/s
  double kappa = 0.0;      // resonator energy decay rate (both ports), 1/s
  double n_bath = 0.0;     // thermal photon occupancy of the resonator
  double impedance = 50.0; // output impedance, ohm

  // omega_q - omega_r; positive when the qubit sits above the resonator.
  double detuning() const { return omega_q - omega_r; }

  // Throws DomainError when an invariant is broken.
  void validate() const;
};

// Lumped-element description of the qubit/line coupling. SI units.
struct CircuitParams {
  double c_g = 0.0;               // coupling capacitance, F
  double c_j = 0.0;               // junction shunt capacitance, F
  double line_length = 0.0;       // transmission-line length, m
  double line_cap_per_len = 0.0;  // line capacitance per unit length, F/m
};

// Qubit polarization. The sign follows the Hamiltonian -(1/2) omega_q sigma_z:
// the ground state has sigma_z = +1 and the excited state sigma_z = -1.
enum class QubitState : int { ground = 1, excited = -1 };

constexpr double sigma_z(QubitState s) { return static_cast<double>(static_cast<int>(s)); }

constexpr QubitState flipped(QubitState s) {
  return s == QubitState::ground ? QubitState::excited : QubitState::ground;
}

enum class VacuumTerm { excluded, included };

struct DerivedQuantities {
  double chi = 0.0;       // dispersive shift, rad/s
  double omega_qr = 0.0;  // detuning, rad/s
  double q_factor = 0.0;  // omega_r / kappa (infinite for kappa = 0)
  double gamma_r = 0.0;   // qubit relaxation rate through the resonator, 1/s
};

// g^2 / omega_qr. Signed: positive when omega_q > omega_r.
double chi(double g, double omega_qr);

// g = C_g sqrt(omega_r omega_q / (2 L c C_J)) for a qubit coupled at the line center.
double coupling_from_circuit(const CircuitParams& circuit, double omega_r, double omega_q);

double quality_factor(double omega_r, double kappa);

// (2 chi / omega_qr) kappa (n + 1), or (2 chi / omega_qr) kappa n with the vacuum
// contribution excluded (valid for n >> 1).
//
// This is the rate of change of sigma_z at sigma_z = -1, i.e. twice the excited
// state population decay rate.
double relaxation_rate(double chi, double omega_qr, double kappa, double photon_number,
                       VacuumTerm vacuum);

// Probability of finding the qubit still excited after `duration`: 1 - gamma_r duration.
// Throws CompleteDecayError when gamma_r duration >= 1.
double fidelity(double gamma_r, double duration);

// Same as fidelity() but returns nullopt instead of throwing on complete decay.
std::optional<double> try_fidelity(double gamma_r, double duration);

// sqrt(hbar omega_r / (L c)): volts per unit of (a + a^dagger) at the line center.
double voltage_scale(double omega_r, double line_length, double line_cap_per_len);

DerivedQuantities derive(const DeviceParams& device, double photon_number, VacuumTerm vacuum);

}  // namespace dqr
