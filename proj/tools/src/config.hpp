#pragma once

// Experiment configuration: one JSON document per run. Every list-valued
// field also accepts a single integer. Fields left out take per-suite
// defaults, filled in by resolve() and echoed into the report.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tentomo/errors.hpp"
#include "tentomo/scalar.hpp"

namespace tentomo::tools {

/// Syntax, type or unknown-field problem; line and column are 1-based, 0
/// when the location is unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line, int column, std::string field = {});

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  int column_;
  std::string field_;
};

struct ExperimentConfig {
  std::string suite;
  std::uint64_t seed = 1;
  std::vector<int> n;
  std::vector<int> m;
  std::vector<int> k;
  Rational rho{1};
  std::optional<int> s;
  int degree = 2;
  std::vector<int> rule_degrees;
  std::vector<int> grid_N;
  double grid_L = 4.0;
  std::optional<int> samples;
  std::optional<double> tolerance;
  double control_threshold = 1e-4;
  bool potential = true;
  std::string output_dir;
  bool timing = false;
};

const std::vector<std::string>& suite_names();
bool known_suite(std::string_view name);

/// Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Fills per-suite defaults for every field left empty.
ExperimentConfig resolve(ExperimentConfig c);

/// Throws PreconditionError naming the offending combination.
void validate(const ExperimentConfig& resolved);

/// The resolved config as JSON (output_dir and timing omitted so reports
/// do not depend on where they were written).
std::string config_to_json(const ExperimentConfig& resolved);

}  // namespace tentomo::tools
