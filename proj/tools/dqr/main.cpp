#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "commands.hpp"
#include "dqr/errors.hpp"

namespace {

using namespace dqr;
using namespace dqr::app;

// Writes to the file at `path`, or to stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError(fmt::format("cannot write '{}'", path), "output");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispersive qubit readout: feasibility report, trajectories, design search and oracle checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::string format_name = "text";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Run configuration (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output_path, "Output file (default: stdout)");
  };

  auto* report = app.add_subcommand("report", "Derived quantities and the constraint report");
  add_common(report);
  report->add_option("--format", format_name, "text or records")->check(CLI::IsMember({"text", "records"}));

  bool plot = false;
  std::string mode_name = "closed-form";
  double dt = 0.0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Field trajectory around the pi pulse as CSV");
  add_common(simulate_cmd);
  simulate_cmd->add_flag("--plot", plot, "Also write an SVG plot next to the CSV");
  simulate_cmd->add_option("--mode", mode_name, "closed-form or ode")
      ->check(CLI::IsMember({"closed-form", "ode"}));
  auto* dt_option = simulate_cmd->add_option("--dt", dt, "Grid step in seconds");

  std::vector<std::string> vary;
  std::size_t points = 9;
  std::size_t max_points = 1'000'000;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep of the design space as CSV");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--vary", vary, "name=lo:hi[:log|lin][:points]");
  sweep_cmd->add_option("--points", points, "Default points per axis")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--max-points", max_points, "Grid size cap")->check(CLI::PositiveNumber);

  std::string objective_name = "max-fidelity";
  std::string audit_path;
  auto* optimize_cmd = app.add_subcommand("optimize", "Constrained design search");
  add_common(optimize_cmd);
  optimize_cmd->add_option("--vary", vary, "name=lo:hi[:log|lin][:points]");
  optimize_cmd->add_option("--objective", objective_name, "min-window, max-fidelity or max-n_total")
      ->check(CLI::IsMember({"min-window", "max-fidelity", "max-n_total"}));
  optimize_cmd->add_option("--format", format_name, "text or records")->check(CLI::IsMember({"text", "records"}));
  optimize_cmd->add_option("--points", points, "Coarse grid points per axis")->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--audit", audit_path, "Write the search audit trail to this file");

  auto* verify_cmd = app.add_subcommand("verify", "Compare the closed forms with the master-equation oracle");
  add_common(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const RunConfig config = load_run_config(config_path);
    const Format format = format_name == "records" ? Format::records : Format::text;
    if (report->parsed()) {
      Output out(output_path);
      return run_report(config, format, out.stream());
    }
    if (simulate_cmd->parsed()) {
      SimulateOptions options;
      options.mode = mode_name == "ode" ? SimulationMode::ode : SimulationMode::closed_form;
      if (dt_option->count()) options.dt = dt;
      Output out(output_path);
      if (!plot) return run_simulate(config, options, out.stream());
      std::filesystem::path svg_path = output_path.empty() ? "trajectory.svg" : output_path;
      svg_path.replace_extension(".svg");
      std::ofstream svg(svg_path);
      if (!svg) throw ConfigError(fmt::format("cannot write '{}'", svg_path.string()), "plot");
      return run_simulate(config, options, out.stream(), &svg);
    }
    std::vector<FreeVariable> free;
    for (const auto& arg : vary) free.push_back(parse_vary(arg));
    if (sweep_cmd->parsed()) {
      SweepOptions options;
      options.points_per_axis = points;
      options.max_points = max_points;
      Output out(output_path);
      return run_sweep(config, free, options, out.stream());
    }
    if (optimize_cmd->parsed()) {
      OptimizeOptions options;
      options.coarse_points = points;
      Output out(output_path);
      if (audit_path.empty())
        return run_optimize(config, free, *objective_from_string(objective_name), options, format,
                            out.stream());
      std::ofstream audit(audit_path);
      if (!audit) throw ConfigError(fmt::format("cannot write '{}'", audit_path), "audit");
      return run_optimize(config, free, *objective_from_string(objective_name), options, format,
                          out.stream(), &audit);
    }
    if (verify_cmd->parsed()) {
      Output out(output_path);
      return run_verify(config, out.stream());
    }
  } catch (const ConfigError& e) {
    if (e.key().empty())
      std::cerr << fmt::format("error: {}\n", e.what());
    else
      std::cerr << fmt::format("error: {} [{}]\n", e.what(), e.key());
    return kExitConfig;
  } catch (const TruncationError& e) {
    std::cerr << fmt::format("error: {} (suggested n_fock = {})\n", e.what(), e.suggested_n_fock());
    return kExitTruncation;
  } catch (const FitError& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return kExitFail;
  } catch (const DomainError& e) {
    std::cerr << fmt::format("error: {}\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
