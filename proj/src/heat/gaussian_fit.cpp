#include "nmsurf/heat/gaussian_fit.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "nmsurf/util/quadrature.hpp"

namespace nmsurf {

GaussianFit gaussian_bound_fit(const std::vector<GaussianSample>& samples, int n, double slack) {
    if (slack < 1.0) throw std::invalid_argument("gaussian_bound_fit: slack must be >= 1");
    std::vector<double> xs, ys;
    std::set<double> distinct_t;
    for (const auto& s : samples) {
        if (s.value <= 0.0 || s.t <= 0.0) continue;
        distinct_t.insert(s.t);
        xs.push_back(s.dist * s.dist / s.t);
        ys.push_back(std::log(s.value) + 0.5 * n * std::log(s.t));
    }
    if (distinct_t.size() < 2)
        throw std::invalid_argument("gaussian_bound_fit: insufficient sample diversity (single t)");
    LineFit lf = fit_line(xs, ys);

    GaussianFit fit;
    fit.C = std::exp(lf.intercept);
    fit.c = -lf.slope;
    fit.samples = int(xs.size());
    fit.max_log_residual = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
        fit.max_log_residual = std::max(fit.max_log_residual,
                                        ys[i] - (lf.intercept + lf.slope * xs[i]));
    fit.pass = fit.c > 0.0 && fit.max_log_residual <= std::log(slack);
    return fit;
}

bool gaussian_envelope_holds(const std::vector<GaussianSample>& samples, int n, double C, double c,
                             double slack) {
    for (const auto& s : samples) {
        if (s.value <= 0.0) continue;
        double bound = slack * C * std::pow(s.t, -0.5 * n) * std::exp(-c * s.dist * s.dist / s.t);
        if (s.value > bound) return false;
    }
    return true;
}

void collect_gaussian_samples(const HeatField& field, double max_dist, double floor,
                              std::vector<GaussianSample>& out) {
    for (int e = 0; e < field.grid.num_active(); ++e) {
        double d = (field.grid.coords_of_equation(e) - field.source).norm();
        double v = field.values[e];
        if (d <= max_dist && v > floor) out.push_back({field.t, d, v});
    }
}

} // namespace nmsurf
