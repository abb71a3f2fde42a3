#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqr/feasibility.hpp"
#include "dqr/model.hpp"

namespace dqr {

enum class Variable { kappa, g, omega_qr, window, n_bar };

std::string_view to_string(Variable v);
std::optional<Variable> variable_from_string(std::string_view name);

// Rates and frequencies are swept on a log scale by default, n_bar and window linearly.
bool default_log_scale(Variable v);

// A full evaluation point: device, measurement window and mean photon number.
struct DesignPoint {
  DeviceParams device;
  double window = 0.0;
  double n_bar = 0.0;

  double get(Variable v) const;
  // Setting omega_qr moves omega_q and keeps omega_r fixed.
  void set(Variable v, double value);
};

struct FreeVariable {
  Variable variable = Variable::kappa;
  double lower = 0.0;
  double upper = 0.0;
  bool log_scale = false;
  std::size_t points = 0;  // 0: use the sweep-wide default
};

struct DesignSpace {
  DesignPoint base;
  std::vector<FreeVariable> free;
  FeasibilityOptions feasibility;

  // Throws ConfigError for non-finite or inverted bounds, nonpositive log bounds and
  // repeated variables.
  void validate() const;
};

inline constexpr std::size_t kConstraintCount = 8;

struct SweepRow {
  std::size_t index = 0;
  DesignPoint point;
  std::vector<double> coordinates;  // values of the free variables, in DesignSpace order
  DerivedQuantities derived;
  std::optional<double> fidelity;   // empty on complete decay
  double n_total = 0.0;
  double voltage = 0.0;
  ConstraintReport report;

  std::array<double, kConstraintCount> ratios() const;
};

struct SweepResult {
  std::vector<Variable> variables;
  std::vector<SweepRow> rows;  // ordered by mixed-radix grid index, last variable fastest
};

struct SweepOptions {
  std::size_t points_per_axis = 9;
  std::size_t max_points = 1'000'000;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Grid values for one axis; endpoints are the exact bounds.
std::vector<double> axis_values(const FreeVariable& axis, std::size_t default_points);

// Derived quantities and the full constraint report at one point. Points where the
// model is undefined (zero detuning) come back as FAIL rows with NaN entries.
SweepRow evaluate(const DesignPoint& point, const FeasibilityOptions& options);

// Throws ConfigError when the grid exceeds options.max_points.
SweepResult sweep(const DesignSpace& space, const SweepOptions& options = {});

enum class Objective { min_window, max_fidelity, max_n_total };

std::string_view to_string(Objective o);
std::optional<Objective> objective_from_string(std::string_view name);

struct OptimizeOptions {
  std::size_t coarse_points = 9;
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;      // simplex diameter, relative to each bounds span
  double penalty_weight = 1e3;
  unsigned threads = 0;
};

struct OptimizeResult {
  bool feasible = false;
  DesignPoint point;
  double objective = 0.0;  // raw objective value (window, fidelity or n_total)
  SweepRow row;
  std::vector<std::string> audit;
};

// Raw objective value at an evaluated row (fidelity may go negative past complete decay).
double objective_value(Objective objective, const SweepRow& row);

// Sum of max(0, ratio - 1) over all constraints, infinite for undefined ratios.
double violation(const ConstraintReport& report);

// Coarse grid scan followed by bounded Nelder-Mead refinement of the penalized
// objective. The returned point never fails a constraint unless no feasible point
// was found, in which case `feasible` is false and the least-violating point is
// returned.
OptimizeResult optimize(const DesignSpace& space, Objective objective,
                        const OptimizeOptions& options = {});

}  // namespace dqr
