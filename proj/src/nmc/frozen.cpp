#include "nmsurf/nmc/frozen.hpp"

#include <cmath>
#include <stdexcept>

namespace nmsurf {

FrozenNmc frozen_coefficient_nmc(const RegionSpec& region, const Eigen::VectorXd& y,
                                 const MetricField& metric, double s, double r, double C_y,
                                 const Calibration& cal, const PvOptions& opts) {
    if (metric.lower() < 0.5 - 1e-12 || metric.upper() > 2.0 + 1e-12 ||
        r * metric.grad_bound() > 1.0 + 1e-12)
        throw std::invalid_argument("frozen_coefficient_nmc: metric fails admissibility at r");

    KernelModel model = KernelModel::constant(metric.dim(), s, metric(y), /*lebesgue=*/true);
    NMCResult pv = nmc_pv(region, y, model, opts);

    FrozenNmc out;
    out.frozen_value = pv.value;
    // dV <-> sqrt(det g(y)) dx costs a dimensional factor, bounded by the
    // ellipticity window; the kernel freezing and volume asymmetry cost the
    // calibrated r^{-s} terms
    double c_n = std::pow(2.0, 0.5 * metric.dim());
    out.gap = c_n * C_y + (cal.C_effacement + cal.C_measure) * std::pow(r, -s);
    out.full_estimate = std::abs(pv.value) + out.gap;
    return out;
}

} // namespace nmsurf
