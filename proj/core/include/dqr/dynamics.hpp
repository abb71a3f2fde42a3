#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dqr/model.hpp"

namespace dqr {

using Complex = std::complex<double>;

// How the drive frequency is chosen.
enum class DriveRule {
  excited_resonant,  // omega_d = omega_r + chi: on resonance with the excited-state cavity line
  ground_resonant,   // omega_d = omega_r - chi
  explicit_frequency,
};

// Classical drive of the resonator. `epsilon` is the semiclassical amplitude
// f0 <c> (1/s) in the frame rotating at omega_d; it is empty until calibrated.
struct DriveSpec {
  DriveRule rule = DriveRule::excited_resonant;
  double explicit_omega_d = 0.0;
  std::optional<Complex> epsilon;

  double omega_d(const DeviceParams& device) const;
  // Throws ConfigError when the drive has not been calibrated.
  Complex amplitude() const;
};

// omega_r - chi sigma_z - omega_d: the resonator detuning seen in the drive frame.
double cavity_detuning(const DeviceParams& device, double omega_d, double sigma_z);

// All amplitudes are <a> in the frame rotating at omega_d.
struct FieldTrajectory {
  std::vector<double> times;             // s, strictly increasing
  std::vector<Complex> amplitude;        // <a>
  std::vector<double> photon_number;     // |<a>|^2 + n_bath
};

struct SigmaTrajectory {
  std::vector<double> times;
  std::vector<double> sigma_z;
  // Largest |sigma_z| seen; values above 1 + 1e-9 mean the linearized equation
  // has left its physical range and `bound_exceeded` is set.
  double max_abs_sigma = 0.0;
  bool bound_exceeded = false;
};

// Piecewise-constant qubit polarization: starts in `initial` and flips at every
// time in `flip_times` (instantaneous pi pulses).
struct PulseSchedule {
  QubitState initial = QubitState::ground;
  std::vector<double> flip_times;

  QubitState state_at(double t) const;
};

// Drive-only steady state eps / (i (omega_r - chi sigma_z - omega_d) + kappa/2).
Complex steady_state_field(const DeviceParams& device, const DriveSpec& drive, QubitState qubit);

// Field t_rel after a pi pulse that brings the excited-state line into resonance
// with the drive, starting from the ground-state steady state:
//   eps [ e^{-x} / (-2 i chi + kappa/2) + (1 - e^{-x}) / (kappa/2) ],  x = kappa t_rel / 2.
Complex transient_field(const DeviceParams& device, Complex epsilon, double t_rel);

// Field t_rel after an instantaneous flip out of `before`, starting from the steady
// state of `before`, for any drive frequency:
//   a_after + (a_before - a_after) e^{-(i delta_after + kappa/2) t_rel}.
Complex field_after_flip(const DeviceParams& device, const DriveSpec& drive, QubitState before,
                         double t_rel);

// Largest RK4 step accepted by integrate_field_ode for this device and drive.
double max_field_step(const DeviceParams& device, double omega_d);

using Envelope = std::function<Complex(double)>;

// Fixed-step RK4 solution of
//   da/dt = -[i (omega_r - chi sigma_z(t) - omega_d) + kappa/2] a + eps(t)
// on the given grid. sigma_z is taken at each step's midpoint, so flips that sit on
// grid nodes are resolved exactly. Without `initial`, a(times[0]) is the steady
// state of the configuration at times[0].
FieldTrajectory integrate_field_ode(const DeviceParams& device, const DriveSpec& drive,
                                    const PulseSchedule& schedule, const Envelope& envelope,
                                    std::span<const double> times,
                                    std::optional<Complex> initial = std::nullopt);

// Small Rabi oscillations around the excited state after an instantaneous flip:
//   -1 + (4 chi / omega_qr)(1 - cos(omega_qr t) e^{-kappa t/2})(n_bath + 1).
double sigma_z_transient(const DeviceParams& device, double t_rel);

// True when g / |omega_qr| <= 0.1, the regime where the closed forms apply.
bool is_dispersive(const DeviceParams& device);

struct SigmaOdeOptions {
  double initial_sigma = -1.0;
  bool include_drive_term = true;
};

// Fixed-step RK4 solution of the sigma_z equation of motion (both the bath/vacuum
// term and the drive-photon term). Time is measured from the pi pulse.
// The grid must have at least 20 points per 2 pi / |omega_qr|.
SigmaTrajectory integrate_sigma_ode(const DeviceParams& device, const DriveSpec& drive,
                                    std::span<const double> times,
                                    const SigmaOdeOptions& options = {});

// Evenly spaced grid with `intervals` steps from start to stop, both included.
std::vector<double> uniform_grid(double start, double stop, std::size_t intervals);

}  // namespace dqr
