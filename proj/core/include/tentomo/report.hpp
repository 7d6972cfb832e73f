#pragma once

// Structured check results shared by the experiments, the command-line
// suites and the acceptance driver.

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tentomo {

struct Check {
  std::string name;
  std::string parameters;  // "key=value;key=value"
  double value = 0.0;
  double tolerance = 0.0;
  /// Negative control: passes when value >= tolerance.
  bool lower_bound = false;
  /// Recorded but excluded from the overall verdict.
  bool informational = false;
  bool pass = false;
  std::optional<double> seconds;
};

/// value <= tolerance (or >= for lower bounds); NaN never passes.
bool check_passes(double value, double tolerance, bool lower_bound);

class Report {
 public:
  explicit Report(std::string scenario, std::string config_json = "{}");

  Check& add(std::string name, std::string parameters, double value, double tolerance,
             bool lower_bound = false);
  Check& add_info(std::string name, std::string parameters, double value, double tolerance);
  void append(const Report& other);

  const std::string& scenario() const { return scenario_; }
  const std::string& config_json() const { return config_; }
  void set_config_json(std::string json) { config_ = std::move(json); }
  const std::vector<Check>& checks() const { return checks_; }
  std::vector<Check>& checks() { return checks_; }
  bool passed() const;
  std::size_t failures() const;

  double total_seconds = 0.0;

  /// Schema 1: {schema, scenario, config, residuals: [...], passed[, timing]}.
  /// Timing fields are omitted unless with_timing, so reruns are byte-identical.
  std::string to_json(bool with_timing) const;
  /// Columns check_name, parameters, residual, tolerance, pass, seconds.
  void write_csv(std::ostream& out, bool with_timing) const;

 private:
  std::string scenario_;
  std::string config_;
  std::vector<Check> checks_;
};

/// "k1=v1;k2=v2" with integers printed without a decimal point.
std::string param_string(std::initializer_list<std::pair<const char*, double>> kv);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace tentomo
