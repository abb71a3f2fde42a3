#include "dqr/model.hpp"

#include <cmath>
#include <limits>

#include "dqr/errors.hpp"
#include "dqr/units.hpp"

namespace dqr {

void DeviceParams::validate() const {
  if (!(omega_r > 0.0)) throw DomainError("omega_r must be positive");
  if (!(omega_q > 0.0)) throw DomainError("omega_q must be positive");
  if (!(g >= 0.0)) throw DomainError("g must be non-negative");
  if (!(kappa >= 0.0)) throw DomainError("kappa must be non-negative");
  if (!(n_bath >= 0.0)) throw DomainError("n_bath must be non-negative");
  if (!(impedance > 0.0)) throw DomainError("impedance must be positive");
  if (omega_q == omega_r) throw DomainError("qubit and resonator must be detuned");
}

double chi(double g, double omega_qr) {
  if (omega_qr == 0.0) throw DomainError("chi: zero qubit-resonator detuning");
  return g * g / omega_qr;
}

double coupling_from_circuit(const CircuitParams& circuit, double omega_r, double omega_q) {
  if (!(circuit.c_g >= 0.0)) throw DomainError("coupling capacitance must be non-negative");
  if (!(circuit.c_j > 0.0) || !(circuit.line_length > 0.0) || !(circuit.line_cap_per_len > 0.0))
    throw DomainError("circuit parameters must be positive");
  if (!(omega_r > 0.0) || !(omega_q > 0.0)) throw DomainError("frequencies must be positive");
  return circuit.c_g *
         std::sqrt(omega_r * omega_q /
                   (2.0 * circuit.line_length * circuit.line_cap_per_len * circuit.c_j));
}

double quality_factor(double omega_r, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("quality factor undefined for kappa <= 0");
  return omega_r / kappa;
}

double relaxation_rate(double chi, double omega_qr, double kappa, double photon_number,
                       VacuumTerm vacuum) {
  if (omega_qr == 0.0) throw DomainError("relaxation_rate: zero detuning");
  if (!(photon_number >= 0.0)) throw DomainError("relaxation_rate: negative photon number");
  const double n = vacuum == VacuumTerm::included ? photon_number + 1.0 : photon_number;
  return 2.0 * chi / omega_qr * kappa * n;
}

std::optional<double> try_fidelity(double gamma_r, double duration) {
  const double lost = gamma_r * duration;
  if (!(lost < 1.0)) return std::nullopt;
  return 1.0 - lost;
}

double fidelity(double gamma_r, double duration) {
  auto f = try_fidelity(gamma_r, duration);
  if (!f) throw CompleteDecayError("gamma_r * duration >= 1: the excited state has decayed");
  return *f;
}

double voltage_scale(double omega_r, double line_length, double line_cap_per_len) {
  if (!(omega_r > 0.0) || !(line_length > 0.0) || !(line_cap_per_len > 0.0))
    throw DomainError("voltage_scale: inputs must be positive");
  return std::sqrt(kHbar * omega_r / (line_length * line_cap_per_len));
}

DerivedQuantities derive(const DeviceParams& device, double photon_number, VacuumTerm vacuum) {
  DerivedQuantities d;
  d.omega_qr = device.detuning();
  d.chi = chi(device.g, d.omega_qr);
  d.q_factor = device.kappa > 0.0 ? device.omega_r / device.kappa
                                  : std::numeric_limits<double>::infinity();
  d.gamma_r = relaxation_rate(d.chi, d.omega_qr, device.kappa, photon_number, vacuum);
  return d;
}

}  // namespace dqr
