#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dqr/errors.hpp"
#include "dqr/oracle.hpp"
#include "dqr/units.hpp"
#include "json.hpp"

namespace dqr::app {

namespace {

using nlohmann::json;

void field(std::ostream& out, std::string_view name, double value, std::string_view unit = {}) {
  fmt::print(out, "  {:<22} {:>16.9e}{}{}\n", name, value, unit.empty() ? "" : " ", unit);
}

std::string_view source_name(PhotonSource s) {
  return s == PhotonSource::trajectory ? "trajectory" : "steady-state product";
}

json constraint_record(const Constraint& c) {
  return {{"record", "constraint"}, {"id", c.id},         {"tag", c.tag},
          {"lhs", c.lhs},           {"rhs", c.rhs},       {"ratio", c.ratio},
          {"kind", to_string(c.kind)}, {"margin", c.margin}, {"status", to_string(c.status)}};
}

void print_report_text(const RunConfig& config, const ReportData& r, std::ostream& out) {
  const auto& d = config.device;
  out << "device\n";
  field(out, "omega_r/2pi", ghz_from_angular(d.omega_r), "GHz");
  field(out, "omega_q/2pi", ghz_from_angular(d.omega_q), "GHz");
  field(out, "g/2pi", mhz_from_angular(d.g), "MHz");
  field(out, "kappa", d.kappa, "1/s");
  field(out, "n_bath", d.n_bath);
  field(out, "window", config.duration, "s");
  out << "derived\n";
  field(out, "chi/2pi", mhz_from_angular(r.derived.chi), "MHz");
  field(out, "omega_qr/2pi", ghz_from_angular(r.derived.omega_qr), "GHz");
  field(out, "Q", r.derived.q_factor);
  field(out, "gamma_r", r.derived.gamma_r, "1/s");
  if (r.fidelity)
    field(out, "fidelity", *r.fidelity);
  else
    fmt::print(out, "  {:<22} {:>16}\n", "fidelity", "complete decay");
  out << "readout\n";
  field(out, "n_bar", r.budget.n_bar);
  field(out, "n_total", r.budget.n_total);
  field(out, "n_total_both_ports", r.budget.n_total_both);
  field(out, "power", r.budget.power, "W");
  field(out, "v_out", r.budget.voltage, "V");
  field(out, "shot_noise", r.budget.shot_noise);
  field(out, "separation", r.budget.separation);
  if (r.voltage_scale) field(out, "line_voltage_scale", *r.voltage_scale, "V");
  fmt::print(out, "constraints (n_total from {})\n", source_name(r.constraints.n_total_source));
  for (const auto& line : explain(r.constraints)) out << "  " << line << '\n';
  fmt::print(out, "overall {}\n", to_string(r.constraints.overall));
}

void print_report_records(const RunConfig& config, const ReportData& r, std::ostream& out) {
  const auto& d = config.device;
  json derived = {{"record", "derived"},
                  {"omega_r", d.omega_r},
                  {"omega_q", d.omega_q},
                  {"g", d.g},
                  {"kappa", d.kappa},
                  {"n_bath", d.n_bath},
                  {"window", config.duration},
                  {"chi", r.derived.chi},
                  {"omega_qr", r.derived.omega_qr},
                  {"q_factor", r.derived.q_factor},
                  {"gamma_r", r.derived.gamma_r},
                  {"fidelity", r.fidelity ? json(*r.fidelity) : json(nullptr)}};
  out << derived.dump() << '\n';
  json budget = {{"record", "readout"},
                 {"n_bar", r.budget.n_bar},
                 {"n_total", r.budget.n_total},
                 {"n_total_both_ports", r.budget.n_total_both},
                 {"power", r.budget.power},
                 {"v_out", r.budget.voltage},
                 {"shot_noise", r.budget.shot_noise},
                 {"separation", r.budget.separation},
                 {"line_voltage_scale", r.voltage_scale ? json(*r.voltage_scale) : json(nullptr)}};
  out << budget.dump() << '\n';
  for (const auto& c : r.constraints.constraints) out << constraint_record(c).dump() << '\n';
  json overall = {{"record", "overall"},
                  {"status", to_string(r.constraints.overall)},
                  {"n_total_source", source_name(r.constraints.n_total_source)}};
  out << overall.dump() << '\n';
}

double parse_double(std::string_view text, std::string_view arg) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(fmt::format("--vary {}: '{}' is not a number", arg, text), "vary");
  return value;
}

std::string fmt_value(double v) { return fmt::format("{:.8e}", v); }

}  // namespace

int exit_code(Status status) {
  switch (status) {
    case Status::pass: return kExitPass;
    case Status::marginal: return kExitMarginal;
    case Status::fail: return kExitFail;
  }
  return kExitFail;
}

// --- report ----------------------------------------------------------------

ReportData compute_report(const RunConfig& config) {
  ReportData r;
  r.n_bar = config.target_nbar + config.device.n_bath;
  r.derived = derive(config.device, r.n_bar, config.feasibility.vacuum);
  r.fidelity = try_fidelity(r.derived.gamma_r, config.duration);
  r.budget = readout_budget(config.device, config.drive, r.n_bar, config.duration);
  if (config.circuit)
    r.voltage_scale = voltage_scale(config.device.omega_r, config.circuit->line_length,
                                    config.circuit->line_cap_per_len);
  r.constraints = check_constraints(config.device, r.n_bar, config.duration, config.feasibility);
  return r;
}

int run_report(const RunConfig& config, Format format, std::ostream& out) {
  const ReportData r = compute_report(config);
  if (format == Format::text)
    print_report_text(config, r, out);
  else
    print_report_records(config, r, out);
  return exit_code(r.constraints.overall);
}

// --- simulate --------------------------------------------------------------

std::vector<SimulationRow> simulate(const RunConfig& config, const SimulateOptions& options) {
  std::vector<SimulationRow> rows;
  if (config.duration == 0.0) return rows;
  const DeviceParams& d = config.device;
  const DriveSpec& drive = config.drive;
  const Complex eps = drive.amplitude();
  const double dt = options.dt.value_or(max_field_step(d, drive.omega_d(d)));
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("--dt must be positive and finite", "dt");

  std::vector<double> times;
  const auto before = static_cast<std::size_t>(std::floor(config.t0 / dt * (1.0 + 1e-12)));
  for (std::size_t k = before; k >= 1; --k) times.push_back(config.t0 - static_cast<double>(k) * dt);
  const auto after = static_cast<std::size_t>(std::max(1.0, std::ceil(config.duration / dt * (1.0 - 1e-12))));
  const auto post = uniform_grid(config.t0, config.t0 + config.duration, after);
  times.insert(times.end(), post.begin(), post.end());

  std::vector<Complex> amplitude(times.size());
  if (options.mode == SimulationMode::ode) {
    const PulseSchedule schedule{QubitState::ground, {config.t0}};
    const auto traj = integrate_field_ode(d, drive, schedule, [eps](double) { return eps; }, times);
    amplitude = traj.amplitude;
  } else {
    const Complex pre = steady_state_field(d, drive, QubitState::ground);
    const bool resonant = drive.rule == DriveRule::excited_resonant;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double rel = times[i] - config.t0;
      if (rel < 0.0)
        amplitude[i] = pre;
      else
        amplitude[i] = resonant ? transient_field(d, eps, rel)
                                : field_after_flip(d, drive, QubitState::ground, rel);
    }
  }

  rows.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    SimulationRow row;
    row.t = times[i];
    row.a = amplitude[i];
    row.n_cavity = std::norm(amplitude[i]) + d.n_bath;
    row.flux = 0.5 * d.kappa * row.n_cavity;
    const double rel = times[i] - config.t0;
    row.sigma_z = rel < 0.0 ? 1.0 : sigma_z_transient(d, rel);
    rows.push_back(row);
  }
  return rows;
}

void write_trajectory_csv(const std::vector<SimulationRow>& rows, std::ostream& out) {
  out << "t_s,re_a,im_a,n_cavity,flux_out_per_s,sigma_z\n";
  for (const auto& r : rows)
    fmt::print(out, "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n", r.t, r.a.real(), r.a.imag(),
               r.n_cavity, r.flux, r.sigma_z);
}

std::string trajectory_svg(const std::vector<SimulationRow>& rows) {
  constexpr double width = 640, height = 400, left = 70, right = 20, top = 30, bottom = 50;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
      width, height, width, height);
  const double pw = width - left - right, ph = height - top - bottom;
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     left, top, pw, ph);
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">t (s)</text>\n", left + pw / 2,
                     height - 12);
  svg += fmt::format("<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">"
                     "cavity photon number</text>\n",
                     top + ph / 2, top + ph / 2);
  if (!rows.empty()) {
    const double t0 = rows.front().t, t1 = rows.back().t;
    double ymax = 0.0;
    for (const auto& r : rows) ymax = std::max(ymax, r.n_cavity);
    if (ymax <= 0.0) ymax = 1.0;
    const double span = t1 > t0 ? t1 - t0 : 1.0;
    svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows)
      svg += fmt::format("{:.2f},{:.2f} ", left + pw * (r.t - t0) / span,
                         top + ph * (1.0 - r.n_cavity / (1.05 * ymax)));
    svg += "\"/>\n";
    svg += fmt::format("<text x=\"{}\" y=\"{}\">{:.3g}</text>\n", left, top + ph + 16, t0);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", left + pw,
                       top + ph + 16, t1);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", left - 4,
                       top + ph * (1.0 - 1.0 / 1.05) + 4, ymax);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">0</text>\n", left - 4, top + ph);
  }
  svg += "</svg>\n";
  return svg;
}

int run_simulate(const RunConfig& config, const SimulateOptions& options, std::ostream& csv,
                 std::ostream* svg) {
  const auto rows = simulate(config, options);
  write_trajectory_csv(rows, csv);
  if (svg) *svg << trajectory_svg(rows);
  return kExitPass;
}

// --- sweep / optimize ------------------------------------------------------

FreeVariable parse_vary(std::string_view arg) {
  const auto eq = arg.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(fmt::format("--vary {}: expected name=lo:hi[:log|lin][:points]", arg), "vary");
  const auto variable = variable_from_string(arg.substr(0, eq));
  if (!variable)
    throw ConfigError(fmt::format("--vary {}: unknown variable (kappa, g, omega_qr, window, n_bar)", arg),
                      "vary");
  std::vector<std::string_view> parts;
  std::string_view rest = arg.substr(eq + 1);
  while (true) {
    const auto colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string_view::npos) break;
    rest = rest.substr(colon + 1);
  }
  if (parts.size() < 2 || parts.size() > 4)
    throw ConfigError(fmt::format("--vary {}: expected name=lo:hi[:log|lin][:points]", arg), "vary");
  FreeVariable f;
  f.variable = *variable;
  f.lower = parse_double(parts[0], arg);
  f.upper = parse_double(parts[1], arg);
  f.log_scale = default_log_scale(f.variable);
  for (std::size_t i = 2; i < parts.size(); ++i) {
    if (parts[i] == "log") {
      f.log_scale = true;
    } else if (parts[i] == "lin") {
      f.log_scale = false;
    } else {
      const double points = parse_double(parts[i], arg);
      if (points < 1.0 || points != std::floor(points))
        throw ConfigError(fmt::format("--vary {}: point count must be a positive integer", arg), "vary");
      f.points = static_cast<std::size_t>(points);
    }
  }
  return f;
}

DesignSpace design_space(const RunConfig& config, const std::vector<FreeVariable>& free) {
  DesignSpace space;
  space.base.device = config.device;
  space.base.window = config.duration;
  space.base.n_bar = config.target_nbar + config.device.n_bath;
  space.free = free;
  space.feasibility = config.feasibility;
  space.validate();
  return space;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  std::vector<std::string> header;
  for (Variable v : result.variables) header.emplace_back(to_string(v));
  for (const char* name : {"chi_rad_per_s", "q_factor", "gamma_r_per_s", "fidelity", "n_total", "v_out_v"})
    header.emplace_back(name);
  for (std::size_t i = 1; i <= kConstraintCount; ++i) header.push_back(fmt::format("C{}", i));
  header.emplace_back("status");
  out << fmt::format("{}\n", fmt::join(header, ","));

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : result.rows) {
    std::vector<std::string> cells;
    for (double c : row.coordinates) cells.push_back(fmt_value(c));
    cells.push_back(fmt_value(row.derived.chi));
    cells.push_back(fmt_value(row.derived.q_factor));
    cells.push_back(fmt_value(row.derived.gamma_r));
    cells.push_back(fmt_value(row.fidelity.value_or(nan)));
    cells.push_back(fmt_value(row.n_total));
    cells.push_back(fmt_value(row.voltage));
    for (double r : row.ratios()) cells.push_back(fmt_value(r));
    cells.emplace_back(to_string(row.report.overall));
    out << fmt::format("{}\n", fmt::join(cells, ","));
  }
}

int run_sweep(const RunConfig& config, const std::vector<FreeVariable>& free,
              const SweepOptions& options, std::ostream& csv) {
  const auto result = sweep(design_space(config, free), options);
  write_sweep_csv(result, csv);
  return kExitPass;
}

int run_optimize(const RunConfig& config, const std::vector<FreeVariable>& free,
                 Objective objective, const OptimizeOptions& options, Format format,
                 std::ostream& out, std::ostream* audit) {
  const auto result = optimize(design_space(config, free), objective, options);
  const auto& p = result.point;
  const auto& row = result.row;
  if (format == Format::text) {
    fmt::print(out, "objective {} = {:.9e}\n", to_string(objective), result.objective);
    fmt::print(out, "feasible {}\n", result.feasible ? "yes" : "no");
    out << "point\n";
    field(out, "kappa", p.device.kappa, "1/s");
    field(out, "g/2pi", mhz_from_angular(p.device.g), "MHz");
    field(out, "omega_qr/2pi", ghz_from_angular(p.device.detuning()), "GHz");
    field(out, "window", p.window, "s");
    field(out, "n_bar", p.n_bar);
    out << "derived\n";
    field(out, "chi/2pi", mhz_from_angular(row.derived.chi), "MHz");
    field(out, "Q", row.derived.q_factor);
    field(out, "gamma_r", row.derived.gamma_r, "1/s");
    if (row.fidelity)
      field(out, "fidelity", *row.fidelity);
    else
      fmt::print(out, "  {:<22} {:>16}\n", "fidelity", "complete decay");
    field(out, "n_total", row.n_total);
    field(out, "v_out", row.voltage, "V");
    out << "constraints\n";
    for (const auto& line : explain(row.report)) out << "  " << line << '\n';
    fmt::print(out, "overall {}\n", to_string(row.report.overall));
  } else {
    json summary = {{"record", "optimum"},
                    {"objective", to_string(objective)},
                    {"value", result.objective},
                    {"feasible", result.feasible},
                    {"kappa", p.device.kappa},
                    {"g", p.device.g},
                    {"omega_qr", p.device.detuning()},
                    {"window", p.window},
                    {"n_bar", p.n_bar},
                    {"chi", row.derived.chi},
                    {"gamma_r", row.derived.gamma_r},
                    {"fidelity", row.fidelity ? json(*row.fidelity) : json(nullptr)},
                    {"n_total", row.n_total},
                    {"v_out", row.voltage}};
    out << summary.dump() << '\n';
    for (const auto& c : row.report.constraints) out << constraint_record(c).dump() << '\n';
    out << json{{"record", "overall"}, {"status", to_string(row.report.overall)}}.dump() << '\n';
  }
  if (audit)
    for (const auto& line : result.audit) *audit << line << '\n';
  return result.feasible ? exit_code(row.report.overall) : kExitFail;
}

// --- verify ----------------------------------------------------------------

std::vector<VerifyCheck> verify(const RunConfig& config) {
  if (!config.oracle) throw ConfigError("verify needs an [oracle] section", "oracle.dt_s");
  const auto& d = config.device;
  const auto& o = *config.oracle;
  auto relative = [](double measured, double expected) {
    return expected != 0.0 ? std::abs(measured / expected - 1.0) : std::abs(measured);
  };
  std::vector<VerifyCheck> checks;
  auto add = [&checks](std::string name, double measured, double expected, double discrepancy,
                       double tolerance) {
    checks.push_back({std::move(name), measured, expected, discrepancy, tolerance,
                      discrepancy <= tolerance});
  };

  const auto field_check = oracle::check_field_transient(d, o, config.target_nbar);
  add("field transient L2", field_check.relative_l2_error, 0.0, field_check.relative_l2_error, 0.05);

  const auto relax = oracle::check_vacuum_relaxation(d, o);
  add("vacuum relaxation rate", relax.fitted_rate, relax.predicted_rate, relax.relative_error, 0.10);
  const double ring = relative(relax.oscillation_amplitude, relax.predicted_amplitude);
  add("sigma_z ringing amplitude", relax.oscillation_amplitude, relax.predicted_amplitude, ring, 0.20);

  const auto shift = oracle::extract_dispersive_shift(d, o);
  const double expected_shift = chi(d.g, d.detuning());
  const double shift_error = expected_shift != 0.0 ? relative(shift.shift, expected_shift)
                                                   : std::abs(shift.shift) / d.omega_r;
  add("dispersive shift", shift.shift, expected_shift, shift_error, 0.05);

  double trace = 0.0, herm = 0.0, eig = 0.0;
  for (const auto* t : {&field_check.trajectory, &relax.trajectory}) {
    trace = std::max(trace, t->max_trace_error);
    herm = std::max(herm, t->max_hermiticity_error);
    eig = std::max(eig, -t->min_eigenvalue);
  }
  add("trace error", trace, 0.0, trace, 1e-9);
  add("hermiticity error", herm, 0.0, herm, 1e-12);
  add("negative eigenvalue", eig, 0.0, std::max(eig, 0.0), 1e-9);
  return checks;
}

int run_verify(const RunConfig& config, std::ostream& out) {
  const auto checks = verify(config);
  bool all = true;
  for (const auto& c : checks) {
    fmt::print(out, "{:<26} measured={:<16.9e} expected={:<16.9e} discrepancy={:<12.4e} tolerance={:<10.3e} {}\n",
               c.name, c.measured, c.expected, c.discrepancy, c.tolerance, c.passed ? "PASS" : "FAIL");
    all = all && c.passed;
  }
  fmt::print(out, "overall {}\n", all ? "PASS" : "FAIL");
  return all ? kExitPass : kExitFail;
}

}  // namespace dqr::app
