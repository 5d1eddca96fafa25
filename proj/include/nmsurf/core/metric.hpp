#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nmsurf {

/// Smooth field of symmetric positive definite matrices on R^n, with the
/// comparability and Lipschitz data the admissibility checks certify.
/// Instances are immutable after construction and safe to share across
/// workers.
class MetricField {
public:
    using Matrix = Eigen::MatrixXd;
    using Vector = Eigen::VectorXd;
    using EvalFn = std::function<Matrix(const Vector&)>;
    using GradFn = std::function<std::vector<Matrix>(const Vector&)>; // per-coordinate derivative

    MetricField(int dim, std::string family, EvalFn eval, GradFn grad,
                double lower, double upper, double grad_bound)
        : dim_(dim), family_(std::move(family)), eval_(std::move(eval)),
          grad_(std::move(grad)), lower_(lower), upper_(upper), grad_bound_(grad_bound) {}

    int dim() const { return dim_; }
    const std::string& family() const { return family_; }
    Matrix operator()(const Vector& x) const { return eval_(x); }
    std::vector<Matrix> gradient(const Vector& x) const { return grad_(x); }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double grad_bound() const { return grad_bound_; }
    bool is_constant() const { return grad_bound_ == 0.0; }

private:
    int dim_;
    std::string family_;
    EvalFn eval_;
    GradFn grad_;
    double lower_, upper_, grad_bound_;
};

MetricField make_constant_metric(const Eigen::MatrixXd& g);
MetricField make_euclidean_metric(int dim);

/// g(x) = (1 + amplitude * exp(-|x|^2 / width^2)) * Id
MetricField make_conformal_bump_metric(int dim, double amplitude, double width);

/// g(x) = diag(1 + amplitude * sin(frequency * x_i + phase))
MetricField make_diag_sin_metric(int dim, double amplitude, double frequency, double phase = 0.0);

/// |v|_g = sqrt(v^T g v) for a constant SPD matrix. Rejects non-SPD input.
double metric_norm(const Eigen::MatrixXd& g_const, const Eigen::VectorXd& v);

/// Uniform tensor grid on the cube [-radius, radius]^n, spacing radius/64 by
/// default. Sup-norms in the certification routines are maxima over this
/// sample set; reports record the grid so the convention is auditable.
struct VerificationGrid {
    double radius = 1.0;
    int points_per_axis = 129;

    std::vector<Eigen::VectorXd> points(int dim) const;
};

struct AdmissibilityReport {
    bool pass = false;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double worst_lipschitz = 0.0; // max over grid of max_k ||d_k g||_2
    double r = 0.0;
    int grid_points = 0;
};

/// Certifies 1/2 <= g <= 2 and r*||Dg|| <= 1 on the verification grid.
AdmissibilityReport check_admissible(const MetricField& metric, double r,
                                     const VerificationGrid& grid = {});

/// Finite-difference estimate of max_k ||d_k g(x)||_2, used to cross-check
/// the analytic gradients of the built-in families.
double lipschitz_fd_estimate(const MetricField& metric, const Eigen::VectorXd& x, double h = 1e-5);

} // namespace nmsurf
