#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "dqr/optimizer.hpp"
#include "dqr/readout.hpp"

namespace dqr::app {

enum class Format { text, records };
enum class SimulationMode { closed_form, ode };

inline constexpr int kExitPass = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMarginal = 2;
inline constexpr int kExitFail = 3;
inline constexpr int kExitTruncation = 4;

int exit_code(Status status);

// --- report ----------------------------------------------------------------

struct ReportData {
  double n_bar = 0.0;
  DerivedQuantities derived;
  std::optional<double> fidelity;  // empty on complete decay
  ReadoutBudget budget;
  std::optional<double> voltage_scale;  // with a [circuit] section
  ConstraintReport constraints;
};

ReportData compute_report(const RunConfig& config);
int run_report(const RunConfig& config, Format format, std::ostream& out);

// --- simulate --------------------------------------------------------------

struct SimulateOptions {
  SimulationMode mode = SimulationMode::closed_form;
  std::optional<double> dt;  // s; defaults to the largest step the ODE rule allows
};

struct SimulationRow {
  double t = 0.0;
  Complex a;
  double n_cavity = 0.0;
  double flux = 0.0;  // photons per second through the monitored port
  double sigma_z = 0.0;
};

// Pre-pulse steady state on [0, t0), the flip at t0 and the transient up to
// t0 + duration on a grid aligned with t0. Empty when the duration is zero.
std::vector<SimulationRow> simulate(const RunConfig& config, const SimulateOptions& options);
void write_trajectory_csv(const std::vector<SimulationRow>& rows, std::ostream& out);
std::string trajectory_svg(const std::vector<SimulationRow>& rows);
int run_simulate(const RunConfig& config, const SimulateOptions& options, std::ostream& csv,
                 std::ostream* svg = nullptr);

// --- sweep / optimize ------------------------------------------------------

// name=lo:hi[:log|lin][:points], bounds in internal units (1/s, rad/s, s).
FreeVariable parse_vary(std::string_view arg);

DesignSpace design_space(const RunConfig& config, const std::vector<FreeVariable>& free);
void write_sweep_csv(const SweepResult& result, std::ostream& out);
int run_sweep(const RunConfig& config, const std::vector<FreeVariable>& free,
              const SweepOptions& options, std::ostream& csv);
int run_optimize(const RunConfig& config, const std::vector<FreeVariable>& free,
                 Objective objective, const OptimizeOptions& options, Format format,
                 std::ostream& out, std::ostream* audit = nullptr);

// --- verify ----------------------------------------------------------------

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// The oracle comparisons against the closed forms; throws TruncationError when the
// Fock truncation is too small.
std::vector<VerifyCheck> verify(const RunConfig& config);
int run_verify(const RunConfig& config, std::ostream& out);

}  // namespace dqr::app
