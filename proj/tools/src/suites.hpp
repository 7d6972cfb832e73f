#pragma once

#include "config.hpp"
#include "tentomo/report.hpp"

namespace tentomo::tools {

/// Runs a resolved, validated config. Cases execute in parallel; rows are
/// appended in case order, so the report does not depend on scheduling.
Report run_suite(const ExperimentConfig& resolved);

/// Within a degree sequence a value counts as a decrease when it does not
/// exceed max(previous, floor).
inline constexpr double kTrendFloor = 1e-12;

}  // namespace tentomo::tools
