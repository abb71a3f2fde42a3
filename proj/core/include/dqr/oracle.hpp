#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dqr/dynamics.hpp"
#include "dqr/model.hpp"

namespace dqr::oracle {

using Matrix = Eigen::MatrixXcd;

enum class Frame { lab, drive_rotating };

struct OracleConfig {
  int n_fock = 12;
  double dt = 0.0;  // s
  Frame frame = Frame::drive_rotating;
  bool rwa = false;  // drop the counter-rotating half of the sigma_y (a^dag - a) coupling
};

// Truncated qubit (x) Fock density matrix. Basis index = q * n_fock + n with
// q = 0 the ground state (sigma_z = +1) and q = 1 the excited state.
class DensityMatrix {
 public:
  DensityMatrix(int n_fock, Matrix rho);

  static int index(QubitState q, int n, int n_fock);
  // Qubit eigenstate times a coherent field, renormalized inside the truncation.
  static DensityMatrix coherent(QubitState q, Complex alpha, int n_fock);
  static DensityMatrix fock(QubitState q, int n, int n_fock);

  int n_fock() const { return n_fock_; }
  int dim() const { return 2 * n_fock_; }
  const Matrix& matrix() const { return rho_; }

  Complex trace() const { return rho_.trace(); }
  double purity() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  // Population of the highest `levels` Fock states.
  double top_population(int levels = 2) const;

  Complex expect_a() const;
  double expect_n() const;
  double expect_sigma_z() const;

  // Instantaneous pi pulse: sigma_x on the qubit.
  DensityMatrix pi_pulse() const;

 private:
  int n_fock_;
  Matrix rho_;
};

// Right-hand side of the master equation
//   d rho/dt = -i [H, rho] + kappa (n_b + 1) D[a] rho + kappa n_b D[a^dag] rho,
//   H = -(w_q/2) sz + w_r a^dag a + i g sy (a^dag - a) + i (eps(t) a^dag - eps(t)* a),
// in units where omega_r = 1 (time in units of 1/omega_r). Zero-point energies are
// dropped.
class Generator {
 public:
  Matrix apply(double tau, const Matrix& rho) const;

  int n_fock() const { return n_fock_; }
  int dim() const { return 2 * n_fock_; }
  double omega_r() const { return omega_r_; }  // rad/s; the scale of the internal units
  double omega_d() const { return omega_d_; }  // rad/s
  Frame frame() const { return config_.frame; }
  const OracleConfig& config() const { return config_; }
  // Highest frequency the integration step has to resolve, rad/s.
  double max_frequency() const { return max_frequency_; }

 private:
  friend Generator build_generator(const DeviceParams&, const DriveSpec&, const OracleConfig&);

  struct Entry {
    int row;
    int col;
    Complex value;
  };

  OracleConfig config_;
  int n_fock_ = 0;
  double omega_r_ = 1.0;
  double omega_d_ = 0.0;
  double max_frequency_ = 0.0;
  std::vector<double> diagonal_;       // H diagonal (scaled)
  std::vector<Entry> static_entries_;  // off-diagonal, time independent
  std::vector<Entry> plus_entries_;    // multiplied by e^{+i nu tau}
  std::vector<Entry> minus_entries_;   // multiplied by e^{-i nu tau}
  double nu_ = 0.0;                    // modulation frequency (scaled)
  double decay_down_ = 0.0;            // kappa (n_b + 1), scaled
  double decay_up_ = 0.0;              // kappa n_b, scaled
  std::vector<double> sqrt_n_;
};

// Throws ConfigError for n_fock < 4 and StepSizeError when config.dt does not give
// 20 steps per period of the highest retained frequency. An unset drive amplitude
// means no drive.
Generator build_generator(const DeviceParams& device, const DriveSpec& drive,
                          const OracleConfig& config);

struct EvolveOptions {
  std::size_t sample_every = 1;
  bool keep_states = false;
  double adequacy_limit = 1e-6;  // top-two Fock population allowed at every sample
};

// Expectations are reported in the frame rotating at omega_d regardless of the
// integration frame, so they compare directly with FieldTrajectory amplitudes.
struct OracleTrajectory {
  std::vector<double> times;  // s
  std::vector<Complex> a;
  std::vector<double> photon_number;
  std::vector<double> sigma_z;
  std::vector<DensityMatrix> states;

  std::size_t steps = 0;
  double max_trace_correction = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_trace_error = 0.0;
  double max_top_population = 0.0;

  bool invariants_hold() const;
};

// Fixed-step RK4 from t_start to t_end (s) with a step no larger than config.dt.
// The trace is renormalized after every step; a per-step drift above 1e-6 throws
// StepSizeError. Top-level Fock population above the adequacy limit throws
// TruncationError carrying a suggested truncation.
OracleTrajectory evolve(const DensityMatrix& rho0, const Generator& generator, double t_start,
                        double t_end, const EvolveOptions& options = {});

// Smallest truncation whose top two levels hold less than `limit` of a Poisson
// distribution with the given mean.
int suggested_n_fock(double mean_photons, int current, double limit = 1e-6);

// --- Checks of the dispersive closed forms -------------------------------------

struct FieldTransientCheck {
  double relative_l2_error = 0.0;
  std::vector<double> times;  // s since the pi pulse
  std::vector<Complex> oracle;
  std::vector<Complex> closed_form;
  OracleTrajectory trajectory;
};

// Starts from the ground-state steady coherent field with the qubit flipped to the
// excited state, drives on the excited-state resonance calibrated to `n_bar`, and
// compares <a>(t) with transient_field over [0, window_in_lifetimes * 2 / kappa].
FieldTransientCheck check_field_transient(const DeviceParams& device, const OracleConfig& config,
                                          double n_bar, double window_in_lifetimes = 2.0,
                                          std::size_t samples = 400);

struct RelaxationCheck {
  double kappa = 0.0;              // leakage used for the run
  double fitted_rate = 0.0;        // d<sigma_z>/dt at the excited state, from the exponential fit
  double predicted_rate = 0.0;     // (2 chi / omega_qr) kappa
  double relative_error = 0.0;
  double oscillation_amplitude = 0.0;  // fitted amplitude of the early Rabi ringing
  double predicted_amplitude = 0.0;    // 4 chi / omega_qr
  OracleTrajectory trajectory;
};

// Empty resonator, excited qubit, no drive. Fits 1 - <sigma_z> = 2 e^{-G t} over
// [0, 0.2 / gamma_vacuum]; fitted_rate = 2 G is the initial slope of <sigma_z>.
// kappa <= 0 selects 0.2 |omega_qr|, inside the regime kappa << |omega_qr| where
// vacuum-induced relaxation is Lorentzian-accurate. The run uses a four-level
// truncation, enough for a single excitation. With g = 0 the run spans 20 / kappa
// and relative_error is the fitted rate in units of kappa.
RelaxationCheck check_vacuum_relaxation(const DeviceParams& device, const OracleConfig& config,
                                        double kappa = 0.0);

struct ShiftFit {
  double shift = 0.0;               // rad/s, (omega_excited - omega_ground) / 2
  double omega_ground = 0.0;        // fitted cavity frequency, rad/s
  double omega_excited = 0.0;
  double residual_ground = 0.0;     // rms phase residual, rad
  double residual_excited = 0.0;
};

// Two closed-system, undriven runs from a small coherent field (alpha) with the
// qubit in each eigenstate; the cavity frequency is the slope of the unwrapped
// phase of <a>. Throws FitError when a residual exceeds max_residual.
ShiftFit extract_dispersive_shift(const DeviceParams& device, const OracleConfig& config,
                                  double alpha = 0.5, double phase_target = 0.25,
                                  double max_residual = 0.05);

}  // namespace dqr::oracle
