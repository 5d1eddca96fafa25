#pragma once

#include <json.hpp>

#include "nmsurf/harness/config.hpp"

namespace nmsurf {

struct RunResult {
    int exit_code = 1; // 0 = all checks pass
    nlohmann::ordered_json summary;
};

/// Runs one experiment and writes its JSON summary and CSV detail files
/// under the configured output directory. Deterministic for fixed
/// (config, seed, calibration).
RunResult run_experiment(const ExperimentConfig& cfg);

} // namespace nmsurf
