#pragma once

#include <string>
#include <vector>

#include "helab/config.hpp"
#include "helab/report.hpp"

namespace helab {

/// Runs the configured scenarios in order, optionally restricted to `only`.
/// Scenario failures, including library errors, become failed checks; only
/// ConfigError escapes (unknown names in `only`).
VerificationReport run_scenarios(const RunConfig& cfg, const std::vector<std::string>& only = {});

}  // namespace helab
