#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "nmsurf/core/metric.hpp"

namespace nmsurf {

/// Closed-form diffeomorphism from a ball B_R(0) in R^n, with analytic
/// Jacobian. The pullback metric phi^* g = Dphi^T (g o phi) Dphi is what the
/// flatness assumption certifies against the identity.
struct ChartSpec {
    int dim = 1;
    double domain_radius = 1.0;
    std::string family;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> map;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;

    Eigen::MatrixXd pullback(const MetricField& g, const Eigen::VectorXd& x) const;
    MetricField pullback_metric(const MetricField& g) const;
};

ChartSpec make_identity_chart(int dim, double domain_radius);
ChartSpec make_linear_chart(const Eigen::MatrixXd& a, double domain_radius);
/// phi(x) = x + beta * x * |x|^2
ChartSpec make_radial_cubic_chart(int dim, double beta, double domain_radius);

struct FlatnessCheck {
    bool pass = false;
    double sup_deviation = 0.0;   // max ||phi^*g - Id||_2 over the grid
    double sup_scaled_grad = 0.0; // r * max_k ||d_k(phi^*g)||_2 over the grid
    int grid_points = 0;
};

/// Certifies the two 1/100 bounds of the order-one flatness assumption on a
/// verification grid over B_r. Derivatives of the pullback are taken by
/// central finite differences of the closed-form pullback.
FlatnessCheck check_flatness_assumption(const ChartSpec& chart, const MetricField& g, double r,
                                        const VerificationGrid& grid = {});

} // namespace nmsurf
