#include "nmsurf/core/metric.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nmsurf {

MetricField make_constant_metric(const Eigen::MatrixXd& g) {
    if (g.rows() != g.cols() || g.rows() < 1)
        throw std::invalid_argument("constant metric: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) throw std::invalid_argument("constant metric: matrix must be SPD");
    int n = int(g.rows());
    Eigen::MatrixXd gc = 0.5 * (g + g.transpose());
    return MetricField(
        n, "constant",
        [gc](const Eigen::VectorXd&) { return gc; },
        [n](const Eigen::VectorXd&) {
            return std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n));
        },
        lo, hi, 0.0);
}

MetricField make_euclidean_metric(int dim) {
    return make_constant_metric(Eigen::MatrixXd::Identity(dim, dim));
}

MetricField make_conformal_bump_metric(int dim, double amplitude, double width) {
    if (width <= 0.0) throw std::invalid_argument("conformal bump: width must be positive");
    double lo = std::min(1.0, 1.0 + amplitude);
    double hi = std::max(1.0, 1.0 + amplitude);
    if (lo <= 0.0) throw std::invalid_argument("conformal bump: amplitude makes metric degenerate");
    // sup |grad c| attained at |x| = width/sqrt(2)
    double gb = std::abs(amplitude) * std::sqrt(2.0) * std::exp(-0.5) / width;
    double w2 = width * width;
    return MetricField(
        dim, "conformal_bump",
        [dim, amplitude, w2](const Eigen::VectorXd& x) {
            double c = 1.0 + amplitude * std::exp(-x.squaredNorm() / w2);
            return Eigen::MatrixXd(c * Eigen::MatrixXd::Identity(dim, dim));
        },
        [dim, amplitude, w2](const Eigen::VectorXd& x) {
            double e = amplitude * std::exp(-x.squaredNorm() / w2);
            std::vector<Eigen::MatrixXd> d(dim);
            for (int k = 0; k < dim; ++k)
                d[k] = (-2.0 * x[k] / w2) * e * Eigen::MatrixXd::Identity(dim, dim);
            return d;
        },
        lo, hi, gb);
}

MetricField make_diag_sin_metric(int dim, double amplitude, double frequency, double phase) {
    double lo = 1.0 - std::abs(amplitude);
    double hi = 1.0 + std::abs(amplitude);
    if (lo <= 0.0) throw std::invalid_argument("diag sin: |amplitude| must be < 1");
    double gb = std::abs(amplitude) * std::abs(frequency);
    return MetricField(
        dim, "diag_sin",
        [dim, amplitude, frequency, phase](const Eigen::VectorXd& x) {
            Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
            for (int i = 0; i < dim; ++i)
                g(i, i) = 1.0 + amplitude * std::sin(frequency * x[i] + phase);
            return g;
        },
        [dim, amplitude, frequency, phase](const Eigen::VectorXd& x) {
            std::vector<Eigen::MatrixXd> d(dim, Eigen::MatrixXd::Zero(dim, dim));
            for (int k = 0; k < dim; ++k)
                d[k](k, k) = amplitude * frequency * std::cos(frequency * x[k] + phase);
            return d;
        },
        lo, hi, gb);
}

double metric_norm(const Eigen::MatrixXd& g_const, const Eigen::VectorXd& v) {
    if (g_const.rows() != g_const.cols() || g_const.rows() != v.size())
        throw std::invalid_argument("metric_norm: dimension mismatch");
    if (!g_const.isApprox(g_const.transpose(), 1e-12))
        throw std::invalid_argument("metric_norm: matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(g_const);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("metric_norm: matrix is not positive definite");
    double q = v.dot(g_const * v);
    return std::sqrt(std::max(q, 0.0));
}

std::vector<Eigen::VectorXd> VerificationGrid::points(int dim) const {
    if (points_per_axis < 1 || radius <= 0.0)
        throw std::invalid_argument("verification grid: empty or degenerate grid");
    int m = points_per_axis;
    std::vector<Eigen::VectorXd> pts;
    std::vector<int> idx(dim, 0);
    auto coord = [&](int i) {
        return (m == 1) ? 0.0 : -radius + 2.0 * radius * i / double(m - 1);
    };
    while (true) {
        Eigen::VectorXd p(dim);
        for (int d = 0; d < dim; ++d) p[d] = coord(idx[d]);
        pts.push_back(p);
        int d = 0;
        while (d < dim && ++idx[d] == m) idx[d++] = 0;
        if (d == dim) break;
    }
    return pts;
}

static double grad_tensor_norm(const std::vector<Eigen::MatrixXd>& dg) {
    double worst = 0.0;
    for (const auto& m : dg) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
        worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return worst;
}

double lipschitz_fd_estimate(const MetricField& metric, const Eigen::VectorXd& x, double h) {
    int n = metric.dim();
    std::vector<Eigen::MatrixXd> dg(n);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        dg[k] = (metric(xp) - metric(xm)) / (2.0 * h);
    }
    return grad_tensor_norm(dg);
}

AdmissibilityReport check_admissible(const MetricField& metric, double r,
                                     const VerificationGrid& grid) {
    if (r <= 0.0) throw std::invalid_argument("check_admissible: r must be positive");
    auto pts = grid.points(metric.dim());
    if (pts.empty()) throw std::invalid_argument("check_admissible: empty verification grid");

    AdmissibilityReport rep;
    rep.r = r;
    rep.grid_points = int(pts.size());
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    rep.max_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        Eigen::MatrixXd g = metric(p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
        rep.max_eigenvalue = std::max(rep.max_eigenvalue, es.eigenvalues().maxCoeff());
        rep.worst_lipschitz = std::max(rep.worst_lipschitz, grad_tensor_norm(metric.gradient(p)));
    }
    const double tol = 1e-12;
    rep.pass = rep.min_eigenvalue >= 0.5 - tol && rep.max_eigenvalue <= 2.0 + tol &&
               r * rep.worst_lipschitz <= 1.0 + tol;
    return rep;
}

} // namespace nmsurf
