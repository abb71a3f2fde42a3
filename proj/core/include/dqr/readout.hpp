#pragma once

#include "dqr/dynamics.hpp"

namespace dqr {

// Output-side quantities of one measurement window. "Port" means one side of the
// symmetric two-sided resonator; each side carries kappa/2.
struct ReadoutBudget {
  double n_bar = 0.0;          // time-averaged intracavity photon number
  double n_total = 0.0;        // photons leaving through the monitored port
  double n_total_both = 0.0;   // photons leaving through both ports
  double power = 0.0;          // W, monitored port
  double voltage = 0.0;        // V across the output impedance
  double shot_noise = 0.0;     // sqrt(n_total), Poissonian
  double separation = 0.0;     // |a_excited - a_ground| in field units
};

struct PhotonCount {
  double n_bar = 0.0;
  double n_total = 0.0;
};

struct PowerVoltage {
  double power = 0.0;
  double voltage = 0.0;
};

// b_out = -sqrt(kappa/2) a. |b_out|^2 is the photon flux through one port.
Complex output_field(Complex a, double kappa);

// (kappa/2) * window * n_bar.
double photons_emitted(double kappa, double window, double n_bar);

// Trapezoidal time average of photon_number over the trajectory, and the photons
// emitted through one port during that span. Throws DomainError for fewer than
// two samples; a zero-length span emits nothing.
PhotonCount total_photons(const FieldTrajectory& trajectory, double kappa);

// P = (kappa/2) n_bar hbar omega_r and V = sqrt(P R).
PowerVoltage output_power_voltage(double n_bar, double kappa, double omega_r, double impedance);

// Distance between the steady coherent amplitudes for the two qubit states under
// the same drive. Thermal photons do not enter.
double state_separation(const DeviceParams& device, const DriveSpec& drive);

// Real positive eps with |steady_state_field|^2 = target for the given qubit state
// and the frequency rule of `drive`.
Complex drive_for_target_nbar(const DeviceParams& device, const DriveSpec& drive,
                              double target_nbar, QubitState qubit);

// Copy of `drive` calibrated so that the excited-state steady photon number is `n_bar`.
DriveSpec calibrated(const DeviceParams& device, DriveSpec drive, double n_bar);

// Steady-state budget for a window of constant n_bar. separation is NaN when the
// drive is uncalibrated or a steady state does not exist (kappa = 0 on resonance).
ReadoutBudget readout_budget(const DeviceParams& device, const DriveSpec& drive, double n_bar,
                             double window);

}  // namespace dqr
