#include "dqr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "dqr/errors.hpp"
#include "dqr/readout.hpp"
#include "dqr/rk4.hpp"
#include "dqr/units.hpp"

namespace dqr::oracle {

namespace {

constexpr Complex kI(0.0, 1.0);

int block(QubitState q) { return q == QubitState::ground ? 0 : 1; }

Complex expect_a(const Matrix& rho, int n_fock) {
  Complex sum = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int n = 0; n + 1 < n_fock; ++n)
      sum += std::sqrt(static_cast<double>(n + 1)) * rho(q * n_fock + n + 1, q * n_fock + n);
  return sum;
}

double expect_n(const Matrix& rho, int n_fock) {
  double sum = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int n = 1; n < n_fock; ++n) sum += n * rho(q * n_fock + n, q * n_fock + n).real();
  return sum;
}

double expect_sigma_z(const Matrix& rho, int n_fock) {
  double sum = 0.0;
  for (int n = 0; n < n_fock; ++n)
    sum += rho(n, n).real() - rho(n_fock + n, n_fock + n).real();
  return sum;
}

double top_population(const Matrix& rho, int n_fock, int levels) {
  double sum = 0.0;
  for (int q = 0; q < 2; ++q)
    for (int n = std::max(0, n_fock - levels); n < n_fock; ++n)
      sum += rho(q * n_fock + n, q * n_fock + n).real();
  return sum;
}

double hermiticity_error(const Matrix& rho) { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix& rho) {
  const Matrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double poisson(double mean, int k) {
  if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

// Least-squares line y = intercept + slope t; returns {slope, rms residual}.
std::pair<double, double> fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - tm) * (y[i] - ym);
    sxx += (t[i] - tm) * (t[i] - tm);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (ym + slope * (t[i] - tm));
    ss += r * r;
  }
  return {slope, std::sqrt(ss / n)};
}

std::size_t stride_for(double span, double dt, std::size_t samples) {
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  return std::max<std::size_t>(1, steps / std::max<std::size_t>(1, samples));
}

}  // namespace

// --- DensityMatrix ---------------------------------------------------------------

DensityMatrix::DensityMatrix(int n_fock, Matrix rho) : n_fock_(n_fock), rho_(std::move(rho)) {
  if (n_fock_ < 1 || rho_.rows() != 2 * n_fock_ || rho_.cols() != 2 * n_fock_)
    throw DomainError("density matrix dimension does not match 2 * n_fock");
}

int DensityMatrix::index(QubitState q, int n, int n_fock) { return block(q) * n_fock + n; }

DensityMatrix DensityMatrix::coherent(QubitState q, Complex alpha, int n_fock) {
  Eigen::VectorXcd field(n_fock);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n < n_fock; ++n) {
    field(n) = c;
    c *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  field.normalize();
  Eigen::VectorXcd ket = Eigen::VectorXcd::Zero(2 * n_fock);
  ket.segment(block(q) * n_fock, n_fock) = field;
  return DensityMatrix(n_fock, ket * ket.adjoint());
}

DensityMatrix DensityMatrix::fock(QubitState q, int n, int n_fock) {
  if (n < 0 || n >= n_fock) throw DomainError("Fock level outside the truncation");
  Matrix rho = Matrix::Zero(2 * n_fock, 2 * n_fock);
  rho(index(q, n, n_fock), index(q, n, n_fock)) = 1.0;
  return DensityMatrix(n_fock, std::move(rho));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }
double DensityMatrix::hermiticity_error() const { return oracle::hermiticity_error(rho_); }
double DensityMatrix::min_eigenvalue() const { return oracle::min_eigenvalue(rho_); }
double DensityMatrix::top_population(int levels) const {
  return oracle::top_population(rho_, n_fock_, levels);
}
Complex DensityMatrix::expect_a() const { return oracle::expect_a(rho_, n_fock_); }
double DensityMatrix::expect_n() const { return oracle::expect_n(rho_, n_fock_); }
double DensityMatrix::expect_sigma_z() const { return oracle::expect_sigma_z(rho_, n_fock_); }

DensityMatrix DensityMatrix::pi_pulse() const {
  const int n = n_fock_;
  Matrix out(2 * n, 2 * n);
  out.block(0, 0, n, n) = rho_.block(n, n, n, n);
  out.block(n, n, n, n) = rho_.block(0, 0, n, n);
  out.block(0, n, n, n) = rho_.block(n, 0, n, n);
  out.block(n, 0, n, n) = rho_.block(0, n, n, n);
  return DensityMatrix(n, std::move(out));
}

// --- Generator -------------------------------------------------------------------

Generator build_generator(const DeviceParams& device, const DriveSpec& drive,
                          const OracleConfig& config) {
  device.validate();
  if (config.n_fock < 4) throw ConfigError("oracle truncation needs n_fock >= 4", "oracle.n_fock");
  if (!(config.dt > 0.0)) throw ConfigError("oracle step must be positive", "oracle.dt_s");

  Generator gen;
  gen.config_ = config;
  const int N = config.n_fock;
  gen.n_fock_ = N;
  gen.omega_r_ = device.omega_r;
  gen.omega_d_ = drive.omega_d(device);

  const double scale = 1.0 / device.omega_r;
  const double wq = device.omega_q * scale;
  const double wd = gen.omega_d_ * scale;
  const double g = device.g * scale;
  const Complex eps = drive.epsilon.value_or(Complex(0.0, 0.0)) * scale;
  const bool rotating = config.frame == Frame::drive_rotating;

  const double cavity = rotating ? 1.0 - wd : 1.0;
  const double qubit = rotating ? wq - wd : wq;
  gen.diagonal_.resize(2 * N);
  for (int n = 0; n < N; ++n) {
    gen.diagonal_[n] = n * cavity - 0.5 * qubit;
    gen.diagonal_[N + n] = n * cavity + 0.5 * qubit;
  }
  gen.sqrt_n_.resize(N + 1);
  for (int n = 0; n <= N; ++n) gen.sqrt_n_[n] = std::sqrt(static_cast<double>(n));

  const auto idx = [N](QubitState q, int n) { return DensityMatrix::index(q, n, N); };
  const auto G = QubitState::ground;
  const auto E = QubitState::excited;
  auto& fixed = gen.static_entries_;
  auto& plus = gen.plus_entries_;
  auto& minus = gen.minus_entries_;

  // i g sy (a^dag - a) = g (s_dn a^dag + s_up a) - g (s_dn a + s_up a^dag)
  for (int n = 0; n + 1 < N; ++n) {
    const double c = g * gen.sqrt_n_[n + 1];
    fixed.push_back({idx(G, n + 1), idx(E, n), c});  // s_dn a^dag
    fixed.push_back({idx(E, n), idx(G, n + 1), c});  // s_up a
  }
  if (!config.rwa) {
    auto& lowering = rotating ? minus : fixed;  // s_dn a, e^{-2 i w_d t}
    auto& raising = rotating ? plus : fixed;    // s_up a^dag, e^{+2 i w_d t}
    for (int n = 1; n < N; ++n) lowering.push_back({idx(G, n - 1), idx(E, n), -g * gen.sqrt_n_[n]});
    for (int n = 0; n + 1 < N; ++n)
      raising.push_back({idx(E, n + 1), idx(G, n), -g * gen.sqrt_n_[n + 1]});
  }
  // i (eps a^dag - eps* a); in the lab frame eps carries e^{-i w_d t}.
  if (eps != Complex(0.0, 0.0)) {
    auto& creation = rotating ? fixed : minus;
    auto& annihilation = rotating ? fixed : plus;
    for (QubitState q : {G, E})
      for (int n = 0; n + 1 < N; ++n) {
        creation.push_back({idx(q, n + 1), idx(q, n), kI * eps * gen.sqrt_n_[n + 1]});
        annihilation.push_back({idx(q, n), idx(q, n + 1), -kI * std::conj(eps) * gen.sqrt_n_[n + 1]});
      }
  }
  gen.nu_ = rotating ? 2.0 * wd : wd;
  gen.decay_down_ = device.kappa * scale * (device.n_bath + 1.0);
  gen.decay_up_ = device.kappa * scale * device.n_bath;

  // Step resolution: spread of the diagonal, the counter-rotating pair frequency,
  // and the largest coupling matrix elements.
  const auto [lo, hi] = std::minmax_element(gen.diagonal_.begin(), gen.diagonal_.end());
  double f_max = *hi - *lo;
  if (!config.rwa) f_max = std::max(f_max, wq + 1.0);
  if (!rotating) f_max = std::max(f_max, wd);
  f_max = std::max({f_max, g * gen.sqrt_n_[N], std::abs(eps) * gen.sqrt_n_[N]});
  gen.max_frequency_ = f_max * device.omega_r;
  const double dt_max = kTwoPi / (20.0 * gen.max_frequency_);
  if (config.dt > dt_max * (1.0 + 1e-12))
    throw StepSizeError(fmt::format("oracle step {:.6g} s exceeds {:.6g} s (20 steps per period "
                                    "of {:.6g} rad/s)",
                                    config.dt, dt_max, gen.max_frequency_),
                        dt_max);
  return gen;
}

Matrix Generator::apply(double tau, const Matrix& rho) const {
  const int D = dim();
  const int N = n_fock_;
  // -i [H, rho] = i (Y - Y^dag) with Y = rho H, built column by column.
  Matrix y(D, D);
  for (int j = 0; j < D; ++j) y.col(j) = diagonal_[j] * rho.col(j);
  auto accumulate = [&](const std::vector<Entry>& entries, Complex phase) {
    for (const auto& e : entries) y.col(e.col) += (e.value * phase) * rho.col(e.row);
  };
  accumulate(static_entries_, 1.0);
  if (!plus_entries_.empty() || !minus_entries_.empty()) {
    const Complex phase = std::polar(1.0, nu_ * tau);
    accumulate(plus_entries_, phase);
    accumulate(minus_entries_, std::conj(phase));
  }
  Matrix out = kI * (y - y.adjoint());

  if (decay_down_ > 0.0 || decay_up_ > 0.0) {
    for (int qj = 0; qj < 2; ++qj)
      for (int m = 0; m < N; ++m) {
        const int j = qj * N + m;
        const double up_m = m + 1 < N ? m + 1.0 : 0.0;
        for (int qi = 0; qi < 2; ++qi)
          for (int n = 0; n < N; ++n) {
            const int i = qi * N + n;
            Complex d = -0.5 * decay_down_ * (n + m) * rho(i, j);
            if (n + 1 < N && m + 1 < N)
              d += decay_down_ * sqrt_n_[n + 1] * sqrt_n_[m + 1] * rho(i + 1, j + 1);
            if (decay_up_ > 0.0) {
              const double up_n = n + 1 < N ? n + 1.0 : 0.0;
              d -= 0.5 * decay_up_ * (up_n + up_m) * rho(i, j);
              if (n >= 1 && m >= 1) d += decay_up_ * sqrt_n_[n] * sqrt_n_[m] * rho(i - 1, j - 1);
            }
            out(i, j) += d;
          }
      }
  }
  return out;
}

// --- Evolution -------------------------------------------------------------------

bool OracleTrajectory::invariants_hold() const {
  return max_trace_error <= 1e-9 && max_hermiticity_error <= 1e-12 && min_eigenvalue >= -1e-9;
}

int suggested_n_fock(double mean_photons, int current, double limit) {
  for (int n = std::max(4, current + 1); n < 400; ++n)
    if (poisson(mean_photons, n - 2) + poisson(mean_photons, n - 1) < 0.1 * limit) return n;
  return 400;
}

OracleTrajectory evolve(const DensityMatrix& rho0, const Generator& generator, double t_start,
                        double t_end, const EvolveOptions& options) {
  if (rho0.n_fock() != generator.n_fock())
    throw ConfigError("initial state truncation differs from the generator", "oracle.n_fock");
  if (!(t_end >= t_start)) throw DomainError("evolve: end time before start time");
  const int N = generator.n_fock();
  const double span = t_end - t_start;
  const auto steps = span > 0.0
                         ? static_cast<std::size_t>(std::ceil(span / generator.config().dt - 1e-9))
                         : std::size_t{0};
  const double h = steps ? span / static_cast<double>(steps) : 0.0;
  const double w = generator.omega_r();
  const double h_scaled = h * w;
  const bool lab = generator.frame() == Frame::lab;

  OracleTrajectory traj;
  traj.steps = steps;
  traj.min_eigenvalue = 1.0;
  double max_mean_photons = 0.0;
  Matrix rho = rho0.matrix();

  auto sample = [&](double t) {
    Complex a = expect_a(rho, N);
    if (lab) a *= std::polar(1.0, generator.omega_d() * t);
    const double n = expect_n(rho, N);
    traj.times.push_back(t);
    traj.a.push_back(a);
    traj.photon_number.push_back(n);
    traj.sigma_z.push_back(expect_sigma_z(rho, N));
    if (options.keep_states) traj.states.emplace_back(N, rho);
    traj.max_trace_error = std::max(traj.max_trace_error, std::abs(rho.trace() - 1.0));
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, hermiticity_error(rho));
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, min_eigenvalue(rho));
    const double top = top_population(rho, N, 2);
    traj.max_top_population = std::max(traj.max_top_population, top);
    max_mean_photons = std::max(max_mean_photons, n);
    if (top > options.adequacy_limit) {
      const int suggestion = suggested_n_fock(max_mean_photons, N, options.adequacy_limit);
      throw TruncationError(
          fmt::format("top two Fock levels hold {:.3g} of the population at t = {:.6g} s", top, t),
          suggestion);
    }
  };

  auto rhs = [&generator](double tau, const Matrix& y) { return generator.apply(tau, y); };
  sample(t_start);
  const std::size_t every = std::max<std::size_t>(1, options.sample_every);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double tau = (t_start + static_cast<double>(k - 1) * h) * w;
    rho = rk4_step(rhs, tau, rho, h_scaled);
    const Complex tr = rho.trace();
    const double correction = std::abs(tr - 1.0);
    if (correction > 1e-6)
      throw StepSizeError(fmt::format("trace drifted by {:.3g} in one step; retry with a step of "
                                      "at most {:.6g} s",
                                      correction, 0.5 * generator.config().dt),
                          0.5 * generator.config().dt);
    traj.max_trace_correction = std::max(traj.max_trace_correction, correction);
    rho /= tr.real();
    if (k % every == 0 || k == steps) sample(t_start + static_cast<double>(k) * h);
  }
  return traj;
}

// --- Checks ------------------------------------------------------------------------

FieldTransientCheck check_field_transient(const DeviceParams& device, const OracleConfig& config,
                                          double n_bar, double window_in_lifetimes,
                                          std::size_t samples) {
  if (!(device.kappa > 0.0)) throw ConfigError("field transient check needs kappa > 0", "device.kappa_per_s");
  const DriveSpec drive = calibrated(device, DriveSpec{DriveRule::excited_resonant, 0.0, {}}, n_bar);
  const Complex before = steady_state_field(device, drive, QubitState::ground);
  const auto rho0 = DensityMatrix::coherent(QubitState::excited, before, config.n_fock);
  const Generator gen = build_generator(device, drive, config);
  const double window = window_in_lifetimes * 2.0 / device.kappa;

  FieldTransientCheck check;
  try {
    check.trajectory = evolve(rho0, gen, 0.0, window, {stride_for(window, config.dt, samples)});
  } catch (const TruncationError& e) {
    const int suggestion = std::max(e.suggested_n_fock(), suggested_n_fock(n_bar, config.n_fock));
    throw TruncationError(fmt::format("field transient toward {} photons: {}", n_bar, e.what()),
                          suggestion);
  }
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < check.trajectory.times.size(); ++i) {
    const double t = check.trajectory.times[i];
    const Complex expected = transient_field(device, *drive.epsilon, t);
    check.times.push_back(t);
    check.oracle.push_back(check.trajectory.a[i]);
    check.closed_form.push_back(expected);
    err += std::norm(check.trajectory.a[i] - expected);
    norm += std::norm(expected);
  }
  check.relative_l2_error = std::sqrt(err / norm);
  return check;
}

RelaxationCheck check_vacuum_relaxation(const DeviceParams& device, const OracleConfig& config,
                                        double kappa) {
  DeviceParams dev = device;
  const double omega_qr = dev.detuning();
  dev.kappa = kappa > 0.0 ? kappa : 0.2 * std::abs(omega_qr);
  dev.n_bath = 0.0;
  OracleConfig cfg = config;
  cfg.n_fock = 4;
  const DriveSpec drive{DriveRule::excited_resonant, 0.0, Complex(0.0, 0.0)};
  const Generator gen = build_generator(dev, drive, cfg);
  const auto rho0 = DensityMatrix::fock(QubitState::excited, 0, cfg.n_fock);

  RelaxationCheck check;
  check.kappa = dev.kappa;
  const double chi_value = chi(dev.g, omega_qr);
  check.predicted_rate = relaxation_rate(chi_value, omega_qr, dev.kappa, 0.0, VacuumTerm::included);
  check.predicted_amplitude = 4.0 * chi_value / omega_qr;
  const double window =
      check.predicted_rate > 0.0 ? 0.2 / check.predicted_rate : 20.0 / dev.kappa;
  check.trajectory = evolve(rho0, gen, 0.0, window, {stride_for(window, cfg.dt, 2000)});
  std::vector<double> t, y;
  for (std::size_t i = 0; i < check.trajectory.times.size(); ++i) {
    t.push_back(check.trajectory.times[i]);
    y.push_back(std::log(0.5 * (1.0 - check.trajectory.sigma_z[i])));
  }
  check.fitted_rate = 0.0 - 2.0 * fit_line(t, y).first;
  check.relative_error = check.predicted_rate > 0.0
                             ? std::abs(check.fitted_rate / check.predicted_rate - 1.0)
                             : (check.fitted_rate == 0.0 ? 0.0 : std::abs(check.fitted_rate) / dev.kappa);

  // Early ringing: sigma_z + 1 = A (1 - cos(w t) e^{-kappa t/2}) + B t over four beats.
  const double ring_window = 4.0 * kTwoPi / std::abs(omega_qr);
  const auto ring = evolve(rho0, gen, 0.0, ring_window, {1});
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < ring.times.size(); ++i) {
    const double ti = ring.times[i];
    const double f = 1.0 - std::cos(omega_qr * ti) * std::exp(-0.5 * dev.kappa * ti);
    const double v = ring.sigma_z[i] + 1.0;
    s11 += f * f;
    s12 += f * ti;
    s22 += ti * ti;
    r1 += f * v;
    r2 += ti * v;
  }
  check.oscillation_amplitude = (r1 * s22 - r2 * s12) / (s11 * s22 - s12 * s12);
  return check;
}

ShiftFit extract_dispersive_shift(const DeviceParams& device, const OracleConfig& config,
                                  double alpha, double phase_target, double max_residual) {
  DeviceParams dev = device;
  dev.kappa = 0.0;
  dev.n_bath = 0.0;
  const DriveSpec drive{DriveRule::explicit_frequency, dev.omega_r, Complex(0.0, 0.0)};
  const Generator gen = build_generator(dev, drive, config);
  const double omega_qr = dev.detuning();
  const double chi_value = chi(dev.g, omega_qr);
  const double duration = chi_value != 0.0 ? phase_target / std::abs(chi_value)
                                           : 50.0 * kTwoPi / std::abs(omega_qr);
  const std::size_t every = stride_for(duration, config.dt, 2000);

  struct Line {
    double omega;
    double residual;
  };
  auto run = [&](QubitState q) {
    const auto rho0 = DensityMatrix::coherent(q, Complex(alpha, 0.0), config.n_fock);
    const auto traj = evolve(rho0, gen, 0.0, duration, {every});
    std::vector<double> phase(traj.a.size());
    double offset = 0.0;
    for (std::size_t i = 0; i < traj.a.size(); ++i) {
      double p = std::arg(traj.a[i]) + offset;
      if (i > 0) {
        while (p - phase[i - 1] > std::numbers::pi) { p -= kTwoPi; offset -= kTwoPi; }
        while (p - phase[i - 1] < -std::numbers::pi) { p += kTwoPi; offset += kTwoPi; }
      }
      phase[i] = p;
    }
    const auto [slope, residual] = fit_line(traj.times, phase);
    return Line{gen.omega_d() - slope, residual};
  };

  auto ground = std::async(std::launch::async, run, QubitState::ground);
  const Line excited = run(QubitState::excited);
  const Line g = ground.get();

  ShiftFit fit;
  fit.omega_ground = g.omega;
  fit.omega_excited = excited.omega;
  fit.residual_ground = g.residual;
  fit.residual_excited = excited.residual;
  fit.shift = 0.5 * (excited.omega - g.omega);
  if (g.residual > max_residual || excited.residual > max_residual)
    throw FitError(fmt::format("phase fit residual {:.3g} rad exceeds {:.3g} rad",
                               std::max(g.residual, excited.residual), max_residual));
  return fit;
}

}  // namespace dqr::oracle
