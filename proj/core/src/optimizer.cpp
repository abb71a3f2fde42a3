#include "dqr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dqr/errors.hpp"
#include "dqr/readout.hpp"

namespace dqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::kappa:
      return "kappa";
    case Variable::g:
      return "g";
    case Variable::omega_qr:
      return "omega_qr";
    case Variable::window:
      return "window";
    case Variable::n_bar:
      return "n_bar";
  }
  return "?";
}

std::optional<Variable> variable_from_string(std::string_view name) {
  for (Variable v : {Variable::kappa, Variable::g, Variable::omega_qr, Variable::window,
                     Variable::n_bar})
    if (to_string(v) == name) return v;
  return std::nullopt;
}

bool default_log_scale(Variable v) {
  return v == Variable::kappa || v == Variable::g || v == Variable::omega_qr;
}

double DesignPoint::get(Variable v) const {
  switch (v) {
    case Variable::kappa:
      return device.kappa;
    case Variable::g:
      return device.g;
    case Variable::omega_qr:
      return device.detuning();
    case Variable::window:
      return window;
    case Variable::n_bar:
      return n_bar;
  }
  return kNaN;
}

void DesignPoint::set(Variable v, double value) {
  switch (v) {
    case Variable::kappa:
      device.kappa = value;
      break;
    case Variable::g:
      device.g = value;
      break;
    case Variable::omega_qr:
      device.omega_q = device.omega_r + value;
      break;
    case Variable::window:
      window = value;
      break;
    case Variable::n_bar:
      n_bar = value;
      break;
  }
}

void DesignSpace::validate() const {
  for (std::size_t i = 0; i < free.size(); ++i) {
    const auto& f = free[i];
    const auto name = std::string(to_string(f.variable));
    if (!std::isfinite(f.lower) || !std::isfinite(f.upper))
      throw ConfigError("bounds of " + name + " must be finite", name);
    if (f.lower > f.upper) throw ConfigError("lower bound of " + name + " exceeds upper", name);
    if (f.log_scale && !(f.lower > 0.0))
      throw ConfigError("log-scale axis " + name + " needs positive bounds", name);
    for (std::size_t j = 0; j < i; ++j)
      if (free[j].variable == f.variable) throw ConfigError(name + " appears twice", name);
  }
}

std::array<double, kConstraintCount> SweepRow::ratios() const {
  std::array<double, kConstraintCount> out;
  out.fill(kNaN);
  for (std::size_t i = 0; i < report.constraints.size() && i < kConstraintCount; ++i)
    out[i] = report.constraints[i].ratio;
  return out;
}

std::vector<double> axis_values(const FreeVariable& axis, std::size_t default_points) {
  const std::size_t n = std::max<std::size_t>(1, axis.points ? axis.points : default_points);
  std::vector<double> values(n, axis.lower);
  if (n == 1) return values;
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
    values[i] = axis.log_scale
                    ? axis.lower * std::pow(axis.upper / axis.lower, frac)
                    : axis.lower + (axis.upper - axis.lower) * frac;
  }
  values.front() = axis.lower;
  values.back() = axis.upper;
  return values;
}

SweepRow evaluate(const DesignPoint& point, const FeasibilityOptions& options) {
  SweepRow row;
  row.point = point;
  try {
    row.derived = derive(point.device, point.n_bar, options.vacuum);
    row.fidelity = try_fidelity(row.derived.gamma_r, point.window);
    row.n_total = photons_emitted(point.device.kappa, point.window, point.n_bar);
    row.voltage = output_power_voltage(point.n_bar, point.device.kappa, point.device.omega_r,
                                       point.device.impedance)
                      .voltage;
    row.report = check_constraints(point.device, point.n_bar, point.window, options);
  } catch (const DomainError&) {
    row.derived = {kNaN, point.device.detuning(), kNaN, kNaN};
    row.fidelity.reset();
    row.n_total = kNaN;
    row.voltage = kNaN;
    row.report = {};
    row.report.overall = Status::fail;
  }
  return row;
}

SweepResult sweep(const DesignSpace& space, const SweepOptions& options) {
  space.validate();
  SweepResult result;
  std::vector<std::vector<double>> axes;
  std::size_t total = 1;
  for (const auto& f : space.free) {
    result.variables.push_back(f.variable);
    axes.push_back(axis_values(f, options.points_per_axis));
    if (total > options.max_points / axes.back().size() + 1) total = options.max_points + 1;
    else total *= axes.back().size();
  }
  if (total > options.max_points)
    throw ConfigError(fmt::format("sweep grid exceeds the cap of {} points", options.max_points),
                      "points");

  result.rows.resize(total);
  auto fill = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> digits(axes.size());
    for (std::size_t index = begin; index < end; ++index) {
      std::size_t rem = index;
      for (std::size_t k = axes.size(); k-- > 0;) {
        digits[k] = rem % axes[k].size();
        rem /= axes[k].size();
      }
      DesignPoint p = space.base;
      std::vector<double> coords(axes.size());
      for (std::size_t k = 0; k < axes.size(); ++k) {
        coords[k] = axes[k][digits[k]];
        p.set(space.free[k].variable, coords[k]);
      }
      SweepRow row = evaluate(p, space.feasibility);
      row.index = index;
      row.coordinates = std::move(coords);
      result.rows[index] = std::move(row);
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    fill(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
  }
  return result;
}

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::min_window:
      return "min-window";
    case Objective::max_fidelity:
      return "max-fidelity";
    case Objective::max_n_total:
      return "max-n_total";
  }
  return "?";
}

std::optional<Objective> objective_from_string(std::string_view name) {
  for (Objective o : {Objective::min_window, Objective::max_fidelity, Objective::max_n_total})
    if (to_string(o) == name) return o;
  return std::nullopt;
}

double objective_value(Objective objective, const SweepRow& row) {
  switch (objective) {
    case Objective::min_window:
      return row.point.window;
    case Objective::max_fidelity:
      return 1.0 - row.derived.gamma_r * row.point.window;
    case Objective::max_n_total:
      return row.n_total;
  }
  return kNaN;
}

double violation(const ConstraintReport& report) {
  if (report.constraints.empty()) return kInf;
  double total = 0.0;
  for (const auto& c : report.constraints) {
    if (std::isnan(c.ratio)) return kInf;
    total += std::max(0.0, c.ratio - 1.0);
  }
  return total;
}

namespace {

// Cost minimized by the search: signed raw objective plus the constraint penalty.
// At feasible points the penalty is exactly zero.
struct Scorer {
  Objective objective;
  double penalty_weight;

  double operator()(const SweepRow& row) const {
    const double raw = objective_value(objective, row);
    if (std::isnan(raw)) return kInf;
    const double signed_raw = objective == Objective::min_window ? raw : -raw;
    const double v = violation(row.report);
    if (v == 0.0) return signed_raw;
    return signed_raw + penalty_weight * v;
  }
};

bool is_feasible(const SweepRow& row) {
  return !row.report.constraints.empty() && row.report.overall != Status::fail;
}

// Maps the unit cube onto the non-degenerate free axes.
struct UnitMap {
  std::vector<FreeVariable> axes;

  double to_value(const FreeVariable& a, double u) const {
    u = std::clamp(u, 0.0, 1.0);
    if (u == 0.0) return a.lower;
    if (u == 1.0) return a.upper;
    return a.log_scale ? a.lower * std::pow(a.upper / a.lower, u)
                       : a.lower + (a.upper - a.lower) * u;
  }
  double to_unit(const FreeVariable& a, double x) const {
    if (a.log_scale) return std::log(x / a.lower) / std::log(a.upper / a.lower);
    return (x - a.lower) / (a.upper - a.lower);
  }
  DesignPoint apply(DesignPoint p, const std::vector<double>& u) const {
    for (std::size_t k = 0; k < axes.size(); ++k) p.set(axes[k].variable, to_value(axes[k], u[k]));
    return p;
  }
};

std::string format_unit(const std::vector<double>& u) {
  return fmt::format("[{:.17g}]", fmt::join(u, ", "));
}

}  // namespace

OptimizeResult optimize(const DesignSpace& space, Objective objective,
                        const OptimizeOptions& options) {
  space.validate();
  const Scorer score{objective, options.penalty_weight};
  OptimizeResult result;
  auto& audit = result.audit;
  audit.push_back(fmt::format("objective {} free-variables {}", to_string(objective),
                              space.free.size()));

  auto finish = [&](SweepRow row) {
    result.feasible = is_feasible(row);
    result.point = row.point;
    result.objective = objective_value(objective, row);
    result.row = std::move(row);
    audit.push_back(fmt::format("result feasible={} objective={:.17g} status={}",
                                result.feasible, result.objective,
                                to_string(result.row.report.overall)));
    return result;
  };

  if (space.free.empty()) return finish(evaluate(space.base, space.feasibility));

  // Coarse phase.
  SweepOptions coarse;
  coarse.points_per_axis = options.coarse_points;
  coarse.threads = options.threads;
  DesignSpace coarse_space = space;
  for (auto& f : coarse_space.free) f.points = 0;
  const SweepResult grid = sweep(coarse_space, coarse);

  std::optional<std::size_t> best_feasible;
  std::size_t least_violating = 0;
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    const auto& row = grid.rows[i];
    if (is_feasible(row) && (!best_feasible || score(row) < score(grid.rows[*best_feasible])))
      best_feasible = i;
    const double v = violation(row.report);
    const double v_best = violation(grid.rows[least_violating].report);
    if (v < v_best || (v == v_best && score(row) < score(grid.rows[least_violating])))
      least_violating = i;
  }
  const SweepRow& seed = grid.rows[best_feasible ? *best_feasible : least_violating];
  audit.push_back(fmt::format("coarse points={} seed-index={} seed-feasible={} seed-cost={:.17g}",
                              grid.rows.size(), seed.index, best_feasible.has_value(),
                              score(seed)));

  // Refinement over the axes with a nonzero span.
  UnitMap map;
  std::vector<double> seed_unit;
  for (std::size_t k = 0; k < space.free.size(); ++k) {
    const auto& f = space.free[k];
    if (f.upper > f.lower) {
      map.axes.push_back(f);
      seed_unit.push_back(map.to_unit(f, seed.coordinates[k]));
    }
  }
  const DesignPoint seed_point = seed.point;
  const std::size_t dim = map.axes.size();
  if (dim == 0) return finish(seed);

  struct Vertex {
    std::vector<double> u;
    double cost;
  };
  auto eval_unit = [&](std::vector<double> u) {
    for (double& x : u) x = std::clamp(x, 0.0, 1.0);
    const double c = score(evaluate(map.apply(seed_point, u), space.feasibility));
    return Vertex{std::move(u), c};
  };

  const double cell = 1.0 / static_cast<double>(std::max<std::size_t>(2, options.coarse_points) - 1);
  std::vector<Vertex> simplex;
  simplex.push_back(Vertex{seed_unit, score(seed)});
  for (std::size_t k = 0; k < dim; ++k) {
    auto u = seed_unit;
    u[k] = u[k] + cell <= 1.0 ? u[k] + cell : u[k] - cell;
    simplex.push_back(eval_unit(u));
  }

  auto sort_simplex = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.cost < b.cost; });
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      for (std::size_t k = 0; k < dim; ++k)
        d = std::max(d, std::abs(simplex[i].u[k] - simplex[0].u[k]));
    return d;
  };
  auto combine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> out(dim);
    for (std::size_t k = 0; k < dim; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  std::size_t iteration = 0;
  sort_simplex();
  while (iteration < options.max_iterations && diameter() >= options.tolerance) {
    ++iteration;
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i].u[k] / static_cast<double>(dim);
    Vertex& worst = simplex.back();
    const double second_worst = simplex[dim - 1].cost;
    std::string_view op;

    Vertex reflected = eval_unit(combine(centroid, worst.u, -kReflect));
    if (reflected.cost < simplex.front().cost) {
      Vertex expanded = eval_unit(combine(centroid, reflected.u, kExpand));
      if (expanded.cost < reflected.cost) {
        worst = std::move(expanded);
        op = "expand";
      } else {
        worst = std::move(reflected);
        op = "reflect";
      }
    } else if (reflected.cost < second_worst) {
      worst = std::move(reflected);
      op = "reflect";
    } else {
      const bool outside = reflected.cost < worst.cost;
      Vertex contracted = outside ? eval_unit(combine(centroid, reflected.u, kContract))
                                  : eval_unit(combine(centroid, worst.u, kContract));
      const double bar = outside ? reflected.cost : worst.cost;
      if (contracted.cost < bar || (outside && contracted.cost == bar)) {
        worst = std::move(contracted);
        op = outside ? "contract-out" : "contract-in";
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i)
          simplex[i] = eval_unit(combine(simplex[0].u, simplex[i].u, kShrink));
        op = "shrink";
      }
    }
    sort_simplex();
    audit.push_back(fmt::format("iter {} {} best-cost={:.17g} best={}", iteration, op,
                                simplex.front().cost, format_unit(simplex.front().u)));
  }
  audit.push_back(fmt::format("refine iterations={} diameter={:.6g}", iteration, diameter()));

  SweepRow refined = evaluate(map.apply(seed_point, simplex.front().u), space.feasibility);
  std::vector<double> coords;
  for (const auto& f : space.free) coords.push_back(refined.point.get(f.variable));
  refined.coordinates = std::move(coords);
  if (best_feasible && !is_feasible(refined)) {
    audit.push_back("refined point fails a constraint; keeping the coarse optimum");
    return finish(seed);
  }
  if (score(refined) > score(seed) && (is_feasible(seed) || !is_feasible(refined))) {
    audit.push_back("refinement did not improve on the coarse optimum");
    return finish(seed);
  }
  return finish(std::move(refined));
}

}  // namespace dqr
