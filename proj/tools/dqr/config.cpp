#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dqr/errors.hpp"
#include "dqr/readout.hpp"
#include "dqr/units.hpp"

namespace dqr::app {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

Value parse_value(const std::string& text, const std::string& key, int line_no) {
  if (text.empty()) throw ConfigError(fmt::format("line {}: missing value", line_no), key);
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw ConfigError(fmt::format("line {}: unterminated string", line_no), key);
    return text.substr(1, text.size() - 2);
  }
  std::string digits;
  std::copy_if(text.begin(), text.end(), std::back_inserter(digits), [](char c) { return c != '_'; });
  const char* begin = digits.data() + (digits.front() == '+' ? 1 : 0);
  const char* end = digits.data() + digits.size();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(fmt::format("line {}: '{}' is not a number, boolean or string", line_no, text),
                      key);
  return value;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "device.omega_r_over_2pi_ghz", "device.omega_q_over_2pi_ghz", "device.g_over_2pi_mhz",
      "device.kappa_per_s",          "device.n_bath",               "device.impedance_ohm",
      "circuit.c_g_ff",              "circuit.c_j_pf",              "circuit.line_length_m",
      "circuit.line_cap_nf_per_m",   "drive.mode",                  "drive.omega_d_over_2pi_ghz",
      "drive.target_nbar",           "measurement.duration_s",      "measurement.t0_s",
      "measurement.include_vacuum_term",
      "feasibility.margin_default",  "feasibility.margin_c1",       "oracle.n_fock",
      "oracle.dt_s",                 "oracle.rwa",
  };
  return keys;
}

double nonnegative(const ConfigTable& t, const std::string& key, double fallback) {
  const double v = t.number_or(key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("{} must be finite and >= 0", key), key);
  return v;
}

double nonnegative(const ConfigTable& t, const std::string& key) {
  return nonnegative(t, key, t.number(key));
}

double positive(const ConfigTable& t, const std::string& key) {
  const double v = t.number(key);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(fmt::format("{} must be finite and > 0", key), key);
  return v;
}

}  // namespace

ConfigTable ConfigTable::parse(std::istream& in) {
  ConfigTable table;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", line_no));
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", line_no));
    const std::string name = trim(std::string_view(line).substr(0, eq));
    const std::string key = section.empty() ? name : section + "." + name;
    if (table.values_.count(key)) throw ConfigError(fmt::format("line {}: duplicate key", line_no), key);
    table.values_[key] = parse_value(trim(std::string_view(line).substr(eq + 1)), key, line_no);
  }
  return table;
}

ConfigTable ConfigTable::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ConfigTable ConfigTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  return parse(in);
}

bool ConfigTable::has_section(const std::string& section) const {
  const std::string prefix = section + ".";
  return std::any_of(values_.begin(), values_.end(),
                     [&](const auto& kv) { return kv.first.rfind(prefix, 0) == 0; });
}

double ConfigTable::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("missing required key {}", key), key);
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  throw ConfigError(fmt::format("{} must be a number", key), key);
}

double ConfigTable::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::optional<double> ConfigTable::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

bool ConfigTable::boolean_or(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<bool>(&it->second)) return *v;
  throw ConfigError(fmt::format("{} must be true or false", key), key);
}

std::string ConfigTable::string_or(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  throw ConfigError(fmt::format("{} must be a quoted string", key), key);
}

RunConfig run_config_from(const ConfigTable& t) {
  for (const auto& [key, value] : t.values())
    if (!known_keys().count(key)) throw ConfigError(fmt::format("unknown key {}", key), key);

  RunConfig cfg;
  DeviceParams& d = cfg.device;
  d.omega_r = angular_from_ghz(positive(t, "device.omega_r_over_2pi_ghz"));
  d.omega_q = angular_from_ghz(positive(t, "device.omega_q_over_2pi_ghz"));
  d.kappa = nonnegative(t, "device.kappa_per_s");
  d.n_bath = nonnegative(t, "device.n_bath", 0.0);
  d.impedance = t.number_or("device.impedance_ohm", 50.0);
  if (!(d.impedance > 0.0)) throw ConfigError("device.impedance_ohm must be > 0", "device.impedance_ohm");
  if (d.omega_q == d.omega_r)
    throw ConfigError("qubit and resonator frequencies must differ", "device.omega_q_over_2pi_ghz");

  const bool has_g = t.has("device.g_over_2pi_mhz");
  const bool has_circuit = t.has_section("circuit");
  if (has_g == has_circuit)
    throw ConfigError("give exactly one of device.g_over_2pi_mhz and a [circuit] section",
                      "device.g_over_2pi_mhz");
  if (has_g) {
    d.g = angular_from_mhz(nonnegative(t, "device.g_over_2pi_mhz", 0.0));
  } else {
    CircuitParams c;
    c.c_g = nonnegative(t, "circuit.c_g_ff") * 1e-15;
    c.c_j = positive(t, "circuit.c_j_pf") * 1e-12;
    c.line_length = positive(t, "circuit.line_length_m");
    c.line_cap_per_len = positive(t, "circuit.line_cap_nf_per_m") * 1e-9;
    cfg.circuit = c;
    d.g = coupling_from_circuit(c, d.omega_r, d.omega_q);
  }

  const std::string mode = t.string_or("drive.mode", "excited-resonant");
  if (mode == "excited-resonant") {
    cfg.drive.rule = DriveRule::excited_resonant;
  } else if (mode == "ground-resonant") {
    cfg.drive.rule = DriveRule::ground_resonant;
  } else if (mode == "explicit") {
    cfg.drive.rule = DriveRule::explicit_frequency;
    cfg.drive.explicit_omega_d = angular_from_ghz(positive(t, "drive.omega_d_over_2pi_ghz"));
  } else {
    throw ConfigError(fmt::format("drive.mode '{}' is not excited-resonant, ground-resonant or explicit", mode),
                      "drive.mode");
  }
  if (mode != "explicit" && t.has("drive.omega_d_over_2pi_ghz"))
    throw ConfigError("drive.omega_d_over_2pi_ghz needs drive.mode = \"explicit\"", "drive.omega_d_over_2pi_ghz");
  cfg.target_nbar = nonnegative(t, "drive.target_nbar");

  cfg.duration = nonnegative(t, "measurement.duration_s");
  cfg.t0 = nonnegative(t, "measurement.t0_s", 0.0);
  cfg.feasibility.vacuum = t.boolean_or("measurement.include_vacuum_term", false) ? VacuumTerm::included
                                                                                 : VacuumTerm::excluded;

  const double strong = nonnegative(t, "feasibility.margin_default", 0.2);
  const double c1 = nonnegative(t, "feasibility.margin_c1", 0.5);
  cfg.feasibility.margins = Margins::uniform(strong, c1);

  if (t.has_section("oracle")) {
    oracle::OracleConfig o;
    const double n_fock = t.number_or("oracle.n_fock", 12.0);
    if (n_fock != std::floor(n_fock) || n_fock < 4.0 || n_fock > 200.0)
      throw ConfigError("oracle.n_fock must be an integer in [4, 200]", "oracle.n_fock");
    o.n_fock = static_cast<int>(n_fock);
    o.dt = positive(t, "oracle.dt_s");
    o.rwa = t.boolean_or("oracle.rwa", false);
    cfg.oracle = o;
  }

  try {
    d.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), "device");
  }
  try {
    cfg.drive = calibrated(d, cfg.drive, cfg.target_nbar);
  } catch (const DomainError&) {
    // No steady state to calibrate against (kappa = 0 on resonance); commands that
    // need an amplitude report the missing calibration.
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return run_config_from(ConfigTable::load(path)); }

}  // namespace dqr::app
