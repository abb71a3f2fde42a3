#include "dqr/readout.hpp"

#include <cmath>
#include <limits>

#include "dqr/errors.hpp"
#include "dqr/units.hpp"

namespace dqr {

Complex output_field(Complex a, double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("output_field: negative kappa");
  return -std::sqrt(0.5 * kappa) * a;
}

double photons_emitted(double kappa, double window, double n_bar) {
  return 0.5 * kappa * window * n_bar;
}

PhotonCount total_photons(const FieldTrajectory& trajectory, double kappa) {
  const auto& t = trajectory.times;
  const auto& n = trajectory.photon_number;
  if (t.size() < 2 || n.size() != t.size())
    throw DomainError("total_photons: need at least two samples to define a window");
  double integral = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) integral += 0.5 * (n[i] + n[i - 1]) * (t[i] - t[i - 1]);
  const double window = t.back() - t.front();
  PhotonCount out;
  out.n_bar = window > 0.0 ? integral / window : n.front();
  out.n_total = photons_emitted(kappa, window, out.n_bar);
  return out;
}

PowerVoltage output_power_voltage(double n_bar, double kappa, double omega_r, double impedance) {
  if (!(n_bar >= 0.0) || !(kappa >= 0.0) || !(omega_r > 0.0) || !(impedance > 0.0))
    throw DomainError("output_power_voltage: invalid input");
  PowerVoltage out;
  out.power = 0.5 * kappa * n_bar * kHbar * omega_r;
  out.voltage = std::sqrt(out.power * impedance);
  return out;
}

double state_separation(const DeviceParams& device, const DriveSpec& drive) {
  const Complex excited = steady_state_field(device, drive, QubitState::excited);
  const Complex ground = steady_state_field(device, drive, QubitState::ground);
  return std::abs(excited - ground);
}

Complex drive_for_target_nbar(const DeviceParams& device, const DriveSpec& drive,
                              double target_nbar, QubitState qubit) {
  if (!(target_nbar >= 0.0)) throw DomainError("target photon number must be non-negative");
  const double delta = cavity_detuning(device, drive.omega_d(device), sigma_z(qubit));
  const double response = std::abs(Complex(0.5 * device.kappa, delta));
  if (response == 0.0)
    throw DomainError("cannot calibrate the drive: no leakage and zero detuning");
  return {std::sqrt(target_nbar) * response, 0.0};
}

DriveSpec calibrated(const DeviceParams& device, DriveSpec drive, double n_bar) {
  drive.epsilon = drive_for_target_nbar(device, drive, n_bar, QubitState::excited);
  return drive;
}

ReadoutBudget readout_budget(const DeviceParams& device, const DriveSpec& drive, double n_bar,
                             double window) {
  ReadoutBudget b;
  b.n_bar = n_bar;
  b.n_total = photons_emitted(device.kappa, window, n_bar);
  b.n_total_both = 2.0 * b.n_total;
  const auto pv = output_power_voltage(n_bar, device.kappa, device.omega_r, device.impedance);
  b.power = pv.power;
  b.voltage = pv.voltage;
  b.shot_noise = std::sqrt(b.n_total);
  b.separation = std::numeric_limits<double>::quiet_NaN();
  if (drive.epsilon) {
    try {
      b.separation = state_separation(device, drive);
    } catch (const DivergenceError&) {
    }
  }
  return b;
}

}  // namespace dqr
