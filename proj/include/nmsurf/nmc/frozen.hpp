#pragma once

#include "nmsurf/kernel/calibration.hpp"
#include "nmsurf/nmc/pv.hpp"

namespace nmsurf {

struct FrozenNmc {
    double frozen_value = 0.0;  // NMC with the kernel of g(y) against Lebesgue measure
    double gap = 0.0;           // certified transport budget C(n) C_y + C(n,s) r^{-s}
    double full_estimate = 0.0; // |frozen_value| + gap: bound on the metric NMC at y
};

/// Constant-coefficient reduction of the NMC at y: evaluates the frozen
/// kernel value and assembles the certified budget that transports a bound
/// C_y on the metric NMC to the frozen one. The r^{-s} part of the budget
/// uses the calibrated kernel-freezing and volume-asymmetry constants.
FrozenNmc frozen_coefficient_nmc(const RegionSpec& region, const Eigen::VectorXd& y,
                                 const MetricField& metric, double s, double r, double C_y,
                                 const Calibration& cal, const PvOptions& opts = {});

} // namespace nmsurf
