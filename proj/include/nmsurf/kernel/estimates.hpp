#pragma once

#include <vector>

#include <Eigen/Dense>

#include "nmsurf/kernel/model.hpp"

namespace nmsurf {

struct L1DifferenceResult {
    double value = 0.0;       // ∫ |K - K_y| dx over the solver box (Lebesgue)
    double tail_budget = 0.0; // certified bound on the part outside the box
    KernelErrorBudget budget;
};

/// L1-in-x gap between the subordinated kernel and its frozen-coefficient
/// version at y. Requires check_admissible(metric, r) to pass. Every length
/// scale of the discretization is proportional to r, so on a family rescaled
/// with r the value inherits the exact r^{-s} homogeneity.
L1DifferenceResult kernel_l1_difference(const MetricField& metric, const Eigen::VectorXd& y,
                                        double r, double s, NumericKernelOptions opts = {});

struct MeasureDifferenceResult {
    double value = 0.0;         // near_field + tail_estimate
    double near_field = 0.0;    // ∫_{B_r(y)} K(x,y) |sqrt(det g)(x) - sqrt(det g)(y)| dx
    double tail_estimate = 0.0; // certified bound outside B_r(y)
    double center_cell_budget = 0.0;
    KernelErrorBudget budget;
};

/// Kernel mass of the volume-form asymmetry around y.
MeasureDifferenceResult measure_difference_integral(const MetricField& metric,
                                                    const Eigen::VectorXd& y, double r, double s,
                                                    NumericKernelOptions opts = {});

struct DirichletKernelGapResult {
    double value = 0.0;     // computed + mass_tail
    double computed = 0.0;  // ∫_0^{r^2} t^{-1-s/2} gap(t) dt (quadrature part)
    double mass_tail = 0.0; // (2/s) r^{-s} mass bound for t > r^2
};

/// Subordinated version of the whole-space vs Dirichlet heat-kernel gap:
/// time-integrates the per-time sup gap with the kernel weight on (0, r^2]
/// and closes with the mass bound beyond.
DirichletKernelGapResult dirichlet_kernel_gap(const MetricField& metric, const Eigen::VectorXd& p,
                                              double r, double rho, double s,
                                              NumericKernelOptions opts = {});

} // namespace nmsurf
