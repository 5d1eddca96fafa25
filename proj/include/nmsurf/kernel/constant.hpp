#pragma once

#include <Eigen/Dense>

#include "nmsurf/core/metric.hpp"
#include "nmsurf/kernel/normalization.hpp"

namespace nmsurf {

/// Flat kernel of a constant metric: value * |x-y|_g^{-(n+s)}. Singular on
/// the diagonal; x = y is rejected.
inline double kernel_constant(const Eigen::MatrixXd& g_const, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y, double s) {
    double d = metric_norm(g_const, x - y);
    if (d <= 0.0) throw std::invalid_argument("kernel_constant: x = y is singular");
    int n = int(x.size());
    KernelNormalization cns(n, s);
    return cns.value * std::pow(d, -double(n + s));
}

/// Exact tail mass of the constant-metric kernel over the complement of the
/// metric ball of radius r, against dV_g: omega_{n-1} * cns * r^{-s} / s.
/// The g^{1/2} change of variables makes this independent of g.
inline double tail_integral_constant(double r, int n, double s) {
    if (r <= 0.0) throw std::invalid_argument("tail_integral_constant: r must be positive");
    KernelNormalization cns(n, s);
    return unit_sphere_area(n) * cns.value * std::pow(r, -s) / s;
}

} // namespace nmsurf
