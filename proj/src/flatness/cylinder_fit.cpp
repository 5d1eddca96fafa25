#include "nmsurf/flatness/cylinder_fit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nmsurf {

namespace {

/// half-width of the point cloud projected on nu
double slab_width(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& nu,
                  double* mid = nullptr) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        double v = p.dot(nu);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (mid) *mid = 0.5 * (lo + hi);
    return 0.5 * (hi - lo);
}

Eigen::VectorXd canonical_sign(Eigen::VectorXd nu) {
    for (int i = 0; i < nu.size(); ++i) {
        if (nu[i] < -1e-14) return -nu;
        if (nu[i] > 1e-14) return nu;
    }
    return nu;
}

/// golden-section refinement of the width over rotations in the (nu, tangent)
/// plane
Eigen::VectorXd refine_in_plane(const std::vector<Eigen::VectorXd>& pts, Eigen::VectorXd nu,
                                const Eigen::VectorXd& tangent, double span) {
    auto dir = [&](double theta) {
        return Eigen::VectorXd((std::cos(theta) * nu + std::sin(theta) * tangent).normalized());
    };
    double a = -span, b = span;
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = slab_width(pts, dir(c)), fd = slab_width(pts, dir(d));
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = slab_width(pts, dir(c));
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = slab_width(pts, dir(d));
        }
    }
    return dir(0.5 * (a + b));
}

} // namespace

CylinderFit fit_cylinder(const std::vector<Eigen::VectorXd>& boundary_pts,
                         const Eigen::VectorXd& center, double radius) {
    const int n = int(center.size());
    std::vector<Eigen::VectorXd> pts;
    for (const auto& p : boundary_pts)
        if ((p - center).norm() <= radius) pts.push_back(p - center);
    if (int(pts.size()) < n)
        throw std::invalid_argument("fit_cylinder: need at least n points inside the ball");

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& p : pts) mean += p;
    mean /= double(pts.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    if (cov.norm() < 1e-28)
        throw std::invalid_argument("fit_cylinder: degenerate point cloud");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd nu = es.eigenvectors().col(0); // smallest principal component

    // coordinate-plane sweeps shrink the min-max width below the PCA start
    for (int sweep = 0; sweep < 3; ++sweep) {
        double span = 0.5 / std::pow(4.0, sweep);
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
            t[k] = 1.0;
            t -= t.dot(nu) * nu;
            double tn = t.norm();
            if (tn < 1e-10) continue;
            t /= tn;
            nu = refine_in_plane(pts, nu, t, span);
        }
    }

    CylinderFit fit;
    fit.direction = canonical_sign(nu);
    fit.width = slab_width(pts, fit.direction, &fit.offset);
    fit.points_used = int(pts.size());
    return fit;
}

} // namespace nmsurf
