#pragma once

#include "nmsurf/harness/config.hpp"
#include "nmsurf/kernel/calibration.hpp"
#include "nmsurf/kernel/model.hpp"

namespace nmsurf {

struct CalibrateOptions {
    std::vector<double> radii{1.0, 0.5, 0.25, 0.125};
    NumericKernelOptions kernel;
    double safety = 1.25;           // headroom over the worst sweep value
    double gauss_slack = 1.05;
    std::vector<double> delta_grid{0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
};

/// Fits the estimate constants, the Gaussian envelope and the dichotomy
/// delta for one (n, s, family). Deterministic; a rerun reproduces the file
/// byte for byte. A non-monotone r-sweep is a fit failure and throws with
/// the sweep table.
Calibration calibrate_family(const MetricConfig& metric, int dim, double s, double alpha,
                             const CalibrateOptions& opts = {});

} // namespace nmsurf
