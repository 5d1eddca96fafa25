#include "nmsurf/core/chart.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nmsurf {

Eigen::MatrixXd ChartSpec::pullback(const MetricField& g, const Eigen::VectorXd& x) const {
    Eigen::MatrixXd j = jacobian(x);
    return j.transpose() * g(map(x)) * j;
}

MetricField ChartSpec::pullback_metric(const MetricField& g) const {
    ChartSpec c = *this;
    MetricField base = g;
    auto eval = [c, base](const Eigen::VectorXd& x) { return c.pullback(base, x); };
    auto grad = [eval, n = dim](const Eigen::VectorXd& x) {
        const double h = 1e-5;
        std::vector<Eigen::MatrixXd> d;
        d.resize(size_t(n));
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            d[size_t(k)] = (eval(xp) - eval(xm)) / (2.0 * h);
        }
        return d;
    };
    // Ellipticity/Lipschitz metadata is not derivable in closed form for a
    // generic chart; the certification grid routines recompute it on demand.
    return MetricField(dim, "pullback:" + family, eval, grad, 0.0,
                       std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity());
}

ChartSpec make_identity_chart(int dim, double domain_radius) {
    ChartSpec c;
    c.dim = dim;
    c.domain_radius = domain_radius;
    c.family = "identity";
    c.map = [](const Eigen::VectorXd& x) { return x; };
    c.jacobian = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(dim, dim); };
    return c;
}

ChartSpec make_linear_chart(const Eigen::MatrixXd& a, double domain_radius) {
    if (a.rows() != a.cols()) throw std::invalid_argument("linear chart: square matrix required");
    if (std::abs(a.determinant()) < 1e-14)
        throw std::invalid_argument("linear chart: matrix is singular");
    ChartSpec c;
    c.dim = int(a.rows());
    c.domain_radius = domain_radius;
    c.family = "linear";
    c.map = [a](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };
    c.jacobian = [a](const Eigen::VectorXd&) { return a; };
    return c;
}

ChartSpec make_radial_cubic_chart(int dim, double beta, double domain_radius) {
    ChartSpec c;
    c.dim = dim;
    c.domain_radius = domain_radius;
    c.family = "radial_cubic";
    c.map = [beta](const Eigen::VectorXd& x) {
        return Eigen::VectorXd(x * (1.0 + beta * x.squaredNorm()));
    };
    c.jacobian = [dim, beta](const Eigen::VectorXd& x) {
        Eigen::MatrixXd j = (1.0 + beta * x.squaredNorm()) * Eigen::MatrixXd::Identity(dim, dim);
        j += 2.0 * beta * x * x.transpose();
        return j;
    };
    return c;
}

static double spectral_norm(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

FlatnessCheck check_flatness_assumption(const ChartSpec& chart, const MetricField& g, double r,
                                        const VerificationGrid& grid) {
    if (r > chart.domain_radius)
        throw std::invalid_argument("check_flatness_assumption: r exceeds chart domain radius");
    VerificationGrid gr = grid;
    gr.radius = r;
    auto pts = gr.points(chart.dim);
    if (pts.empty()) throw std::invalid_argument("check_flatness_assumption: empty grid");

    const double fd = std::max(1e-6, r / 4096.0);
    FlatnessCheck out;
    out.grid_points = int(pts.size());
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(chart.dim, chart.dim);
    for (const auto& p : pts) {
        if (p.norm() > chart.domain_radius * (1.0 + 1e-12)) continue; // only certify inside B_r
        Eigen::MatrixXd pb;
        try {
            pb = chart.pullback(g, p);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "chart not evaluable at grid point (";
            for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
            os << "): " << e.what();
            throw std::runtime_error(os.str());
        }
        out.sup_deviation = std::max(out.sup_deviation, spectral_norm(pb - id));
        for (int k = 0; k < chart.dim; ++k) {
            Eigen::VectorXd xp = p, xm = p;
            xp[k] += fd;
            xm[k] -= fd;
            Eigen::MatrixXd d = (chart.pullback(g, xp) - chart.pullback(g, xm)) / (2.0 * fd);
            out.sup_scaled_grad = std::max(out.sup_scaled_grad, r * spectral_norm(d));
        }
    }
    out.pass = out.sup_deviation <= 0.01 + 1e-12 && out.sup_scaled_grad <= 0.01 + 1e-12;
    return out;
}

} // namespace nmsurf
