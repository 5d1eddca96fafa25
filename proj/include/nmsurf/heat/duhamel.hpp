#pragma once

#include <Eigen/Dense>

#include "nmsurf/core/metric.hpp"
#include "nmsurf/heat/solver.hpp"

namespace nmsurf {

/// H(t,.,y) - H_{g(y)}(t,.,y) computed as the time convolution of the frozen
/// kernel's generator defect against the variable-coefficient semigroup,
/// marched as an inhomogeneous solve with zero initial data. Independent of
/// the direct-subtraction route (solve_heat minus the closed form), which it
/// is cross-checked against.
HeatField duhamel_difference(const MetricField& metric, const Eigen::VectorXd& y,
                             const SolvePlan& plan, double t,
                             std::optional<double> box_half = std::nullopt);

/// Direct route: whole-space solve from a discrete delta minus the exact
/// frozen-metric kernel sampled on the same grid.
HeatField direct_difference(const MetricField& metric, const Eigen::VectorXd& y,
                            const SolvePlan& plan, double t,
                            std::optional<double> box_half = std::nullopt);

/// L1 norm of a difference field against the Lebesgue measure.
double l1_norm(const HeatField& field);

} // namespace nmsurf
