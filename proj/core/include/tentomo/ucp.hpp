#pragma once

// Desk-scale demonstrations of the unique-continuation mechanics: potential
// and generalized potential fields produce vanishing data, while random
// fields (negative controls) do not; transverse-ray data determine f
// pointwise once enough independent directions are available.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tentomo/report.hpp"
#include "tentomo/scalar.hpp"

namespace tentomo {

enum class UcpScenario { Ray, Mrt, Trt };

std::optional<UcpScenario> parse_ucp_scenario(std::string_view name);
std::string_view to_string(UcpScenario s);

struct UcpConfig {
  int n = 2;
  int m = 1;
  int k = 1;             // mrt: moment order
  Rational rho{1};
  int s = 6;             // bump exponent of the potential v
  int degree = 2;        // core polynomial degree
  int rule_degree = 40;  // sphere rule for normal operators
  int samples = 20;      // points in U (lines, recovery points)
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  double control_threshold = 1e-4;
  /// false replaces the potential field by a random one while keeping the
  /// vanishing assertions, which must then fail.
  bool potential = true;
};

/// Throws PreconditionError for combinations the scenario cannot run.
void validate(UcpScenario scenario, const UcpConfig& config);

Report ucp_experiment(UcpScenario scenario, const UcpConfig& config);

}  // namespace tentomo
