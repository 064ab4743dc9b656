#pragma once

// Named experiments behind the command-line runner. Configs are flat
// key=value text or a JSON object; unknown keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsd {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string value;
  /// 1-based source line, 0 for JSON input or programmatic entries.
  int line = 0;
};

class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  /// JSON when the first non-blank character is '{', key=value otherwise.
  static ExperimentConfig parse(const std::string& text,
                                const std::string& source = "config");
  static ExperimentConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, ConfigEntry> entries_;
  std::string source_ = "config";
};

/// Parses a real-valued expression: numbers and `pi` joined by * and /,
/// with an optional sign ("pi/64", "-3*pi/4", "0.25").
double parse_real_expression(const std::string& text);

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

struct ExperimentOutput {
  std::string text;
  /// False when a numerical tolerance check failed (exit code 3).
  bool tolerance_ok = true;
  std::string message;
};

std::vector<std::string> experiment_names();
/// Default output format of an experiment (oracle-equiv reports JSON).
OutputFormat default_format(const std::string& experiment);

/// Throws ConfigError on unknown experiments, unknown keys or bad values.
ExperimentOutput run_experiment(const std::string& experiment,
                                const ExperimentConfig& config,
                                OutputFormat format,
                                std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace qsd
