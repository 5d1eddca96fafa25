#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "nmsurf/core/metric.hpp"

namespace nmsurf {

/// Heat kernel of a constant SPD metric g on R^n:
///   H_g(t,x,y) = (4 pi t)^{-n/2} exp(-|x-y|_g^2 / (4t)),
/// with unit mass against dV_g = sqrt(det g) dx.
inline double heat_constant(const Eigen::MatrixXd& g_const, double t, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y) {
    if (t <= 0.0) throw std::invalid_argument("heat_constant: t must be positive");
    int n = int(x.size());
    double d = metric_norm(g_const, x - y);
    return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-d * d / (4.0 * t));
}

/// Same kernel at a known metric distance; avoids re-checking the matrix in
/// inner loops.
inline double heat_constant_at_distance(int n, double t, double dist_g) {
    return std::pow(4.0 * M_PI * t, -0.5 * n) * std::exp(-dist_g * dist_g / (4.0 * t));
}

} // namespace nmsurf
