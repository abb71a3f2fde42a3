#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "dqr/dynamics.hpp"
#include "dqr/feasibility.hpp"
#include "dqr/model.hpp"
#include "dqr/oracle.hpp"

namespace dqr::app {

using Value = std::variant<double, bool, std::string>;

// Flat view of a TOML-compatible file: "section.key" -> value. Supports [section]
// headers, bare keys, numbers, booleans, double-quoted strings and # comments.
class ConfigTable {
 public:
  static ConfigTable parse(std::istream& in);
  static ConfigTable parse_string(const std::string& text);
  static ConfigTable load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  bool has_section(const std::string& section) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::optional<double> optional_number(const std::string& key) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

struct RunConfig {
  DeviceParams device;
  std::optional<CircuitParams> circuit;
  DriveSpec drive;  // calibrated to target_nbar
  double target_nbar = 0.0;
  double duration = 0.0;  // s
  double t0 = 0.0;        // s, time of the pi pulse
  FeasibilityOptions feasibility;
  std::optional<oracle::OracleConfig> oracle;
};

// Validates keys and units and calibrates the drive. Throws ConfigError naming the
// offending key.
RunConfig run_config_from(const ConfigTable& table);
RunConfig load_run_config(const std::string& path);

}  // namespace dqr::app
