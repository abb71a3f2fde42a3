#include "dqr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "dqr/errors.hpp"
#include "dqr/rk4.hpp"
#include "dqr/units.hpp"

namespace dqr {

namespace {

void require_increasing(std::span<const double> times) {
  if (times.empty()) throw ConfigError("time grid is empty");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ConfigError("time grid must be strictly increasing");
}

double largest_step(std::span<const double> times) {
  double h = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) h = std::max(h, times[i] - times[i - 1]);
  return h;
}

}  // namespace

double DriveSpec::omega_d(const DeviceParams& device) const {
  switch (rule) {
    case DriveRule::excited_resonant:
      return device.omega_r + chi(device.g, device.detuning());
    case DriveRule::ground_resonant:
      return device.omega_r - chi(device.g, device.detuning());
    case DriveRule::explicit_frequency:
      return explicit_omega_d;
  }
  return explicit_omega_d;
}

Complex DriveSpec::amplitude() const {
  if (!epsilon) throw ConfigError("drive amplitude has not been calibrated", "drive.target_nbar");
  return *epsilon;
}

double cavity_detuning(const DeviceParams& device, double omega_d, double sigma_z) {
  return device.omega_r - chi(device.g, device.detuning()) * sigma_z - omega_d;
}

QubitState PulseSchedule::state_at(double t) const {
  QubitState s = initial;
  for (double flip : flip_times)
    if (t >= flip) s = flipped(s);
  return s;
}

Complex steady_state_field(const DeviceParams& device, const DriveSpec& drive, QubitState qubit) {
  const double delta = cavity_detuning(device, drive.omega_d(device), sigma_z(qubit));
  const Complex denom(0.5 * device.kappa, delta);
  if (denom == Complex(0.0, 0.0))
    throw DivergenceError("steady state diverges: no leakage and zero drive detuning");
  return drive.amplitude() / denom;
}

Complex transient_field(const DeviceParams& device, Complex epsilon, double t_rel) {
  if (!(t_rel >= 0.0)) throw DomainError("transient_field: negative time since the pulse");
  if (!(device.kappa > 0.0)) throw DomainError("transient_field: kappa must be positive");
  const double half_kappa = 0.5 * device.kappa;
  const double two_chi = 2.0 * chi(device.g, device.detuning());
  const double x = half_kappa * t_rel;
  const double memory = std::exp(-x);
  const double growth = -std::expm1(-x);
  return epsilon * (memory / Complex(half_kappa, -two_chi) + growth / half_kappa);
}

Complex field_after_flip(const DeviceParams& device, const DriveSpec& drive, QubitState before,
                         double t_rel) {
  if (!(t_rel >= 0.0)) throw DomainError("field_after_flip: negative time since the pulse");
  const QubitState after = flipped(before);
  const Complex start = steady_state_field(device, drive, before);
  const Complex end = steady_state_field(device, drive, after);
  const double delta = cavity_detuning(device, drive.omega_d(device), sigma_z(after));
  return end + (start - end) * std::exp(-Complex(0.5 * device.kappa, delta) * t_rel);
}

double max_field_step(const DeviceParams& device, double omega_d) {
  double scale = std::numeric_limits<double>::infinity();
  if (device.kappa > 0.0) scale = std::min(scale, 2.0 / device.kappa);
  const double c = std::abs(chi(device.g, device.detuning()));
  if (c > 0.0) scale = std::min(scale, 1.0 / (2.0 * c));
  const double detune = std::abs(device.omega_r - omega_d);
  if (detune > 0.0) scale = std::min(scale, 1.0 / detune);
  return scale / 20.0;
}

FieldTrajectory integrate_field_ode(const DeviceParams& device, const DriveSpec& drive,
                                    const PulseSchedule& schedule, const Envelope& envelope,
                                    std::span<const double> times,
                                    std::optional<Complex> initial) {
  require_increasing(times);
  const double omega_d = drive.omega_d(device);
  const double h_max = max_field_step(device, omega_d);
  const double h = largest_step(times);
  if (h > h_max * (1.0 + 1e-9))
    throw StepSizeError(fmt::format("field grid step {:.6g} s exceeds the required {:.6g} s", h,
                                    h_max),
                        h_max);

  const double chi_value = chi(device.g, device.detuning());
  const double half_kappa = 0.5 * device.kappa;

  Complex a;
  if (initial) {
    a = *initial;
  } else {
    DriveSpec at_start = drive;
    at_start.epsilon = envelope(times.front());
    a = steady_state_field(device, at_start, schedule.state_at(times.front()));
  }

  FieldTrajectory out;
  out.times.assign(times.begin(), times.end());
  out.amplitude.reserve(times.size());
  out.photon_number.reserve(times.size());
  auto record = [&](Complex value) {
    out.amplitude.push_back(value);
    out.photon_number.push_back(std::norm(value) + device.n_bath);
  };
  record(a);

  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t = times[i - 1];
    const double step = times[i] - t;
    const double sz = sigma_z(schedule.state_at(t + 0.5 * step));
    const Complex decay(half_kappa, device.omega_r - chi_value * sz - omega_d);
    auto rhs = [&](double tau, Complex y) { return -decay * y + envelope(tau); };
    a = rk4_step(rhs, t, a, step);
    record(a);
  }
  return out;
}

double sigma_z_transient(const DeviceParams& device, double t_rel) {
  if (!(t_rel >= 0.0)) throw DomainError("sigma_z_transient: negative time since the pulse");
  const double omega_qr = device.detuning();
  const double c = chi(device.g, omega_qr);
  const double ringing = 1.0 - std::cos(omega_qr * t_rel) * std::exp(-0.5 * device.kappa * t_rel);
  return -1.0 + 4.0 * c / omega_qr * ringing * (device.n_bath + 1.0);
}

bool is_dispersive(const DeviceParams& device) {
  return device.g / std::abs(device.detuning()) <= 0.1;
}

SigmaTrajectory integrate_sigma_ode(const DeviceParams& device, const DriveSpec& drive,
                                    std::span<const double> times,
                                    const SigmaOdeOptions& options) {
  require_increasing(times);
  const double omega_qr = device.detuning();
  const double h_max = kTwoPi / (20.0 * std::abs(omega_qr));
  const double h = largest_step(times);
  if (h > h_max * (1.0 + 1e-9))
    throw StepSizeError(
        fmt::format("sigma grid step {:.6g} s does not resolve the qubit-resonator beat; "
                    "need <= {:.6g} s",
                    h, h_max),
        h_max);

  const double chi_value = chi(device.g, omega_qr);
  const double prefactor = 2.0 * device.g * device.g / (omega_qr * omega_qr);
  const double kappa = device.kappa;
  const double n_b = device.n_bath;

  double drive_power = 0.0;
  double omega_d = 0.0;
  if (options.include_drive_term) {
    drive_power = std::norm(drive.amplitude());
    omega_d = drive.omega_d(device);
  }

  auto rhs = [&](double t, double s) {
    const double envelope = std::exp(-0.5 * kappa * t);
    const double c = std::cos(omega_qr * t) * envelope;
    const double sn = std::sin(omega_qr * t) * envelope;
    double dsdt = (2.0 * omega_qr * sn + kappa * (1.0 - c)) * (0.5 - s * (n_b + 0.5));
    if (drive_power > 0.0) {
      const double detuning = omega_d - device.omega_r + chi_value * (s >= 0.0 ? 1.0 : -1.0);
      const double photons = drive_power / (detuning * detuning + 0.25 * kappa * kappa);
      dsdt -= s * photons * (2.0 * detuning * (1.0 - c) + kappa * sn);
    }
    return prefactor * dsdt;
  };

  SigmaTrajectory out;
  out.times.assign(times.begin(), times.end());
  out.sigma_z.reserve(times.size());
  double s = options.initial_sigma;
  out.sigma_z.push_back(s);
  for (std::size_t i = 1; i < times.size(); ++i) {
    s = rk4_step(rhs, times[i - 1], s, times[i] - times[i - 1]);
    out.sigma_z.push_back(s);
  }
  for (double v : out.sigma_z) out.max_abs_sigma = std::max(out.max_abs_sigma, std::abs(v));
  out.bound_exceeded = out.max_abs_sigma > 1.0 + 1e-9;
  return out;
}

std::vector<double> uniform_grid(double start, double stop, std::size_t intervals) {
  if (intervals == 0) return {start};
  std::vector<double> grid(intervals + 1);
  const double span = stop - start;
  for (std::size_t i = 0; i <= intervals; ++i)
    grid[i] = start + span * (static_cast<double>(i) / static_cast<double>(intervals));
  grid.back() = stop;
  return grid;
}

}  // namespace dqr
