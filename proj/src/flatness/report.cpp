#include "nmsurf/flatness/report.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nmsurf/util/quadrature.hpp"

namespace nmsurf {

namespace {

/// nearest-neighbour spacing, sampled; the cloud's resolution scale
double cloud_resolution(const std::vector<Eigen::VectorXd>& pts) {
    double acc = 0.0;
    int cnt = 0;
    std::size_t stride = std::max<std::size_t>(1, pts.size() / 64);
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            best = std::min(best, (pts[j] - pts[i]).norm());
        }
        if (std::isfinite(best)) {
            acc += best;
            ++cnt;
        }
    }
    return cnt ? acc / cnt : 0.0;
}

} // namespace

FlatnessReport dyadic_flatness_report(const std::vector<Eigen::VectorXd>& boundary_pts,
                                      const Eigen::VectorXd& base, int k_max, double alpha,
                                      const FlatnessOptions& opts) {
    if (boundary_pts.empty()) throw std::invalid_argument("dyadic_flatness_report: empty cloud");
    (void)alpha;
    const int n = int(base.size());
    FlatnessReport rep;
    rep.resolution = cloud_resolution(boundary_pts);

    for (int l = 0; l <= k_max; ++l) {
        double radius = opts.base_radius * std::pow(2.0, -l);
        ScaleEntry entry;
        entry.level = l;
        int inside = 0;
        for (const auto& p : boundary_pts)
            if ((p - base).norm() <= radius) ++inside;
        entry.points = inside;
        if (inside < opts.min_points_factor * n) {
            entry.omitted = true; // undersampled: skipped, never extrapolated
            rep.scales.push_back(std::move(entry));
            continue;
        }
        CylinderFit fit = fit_cylinder(boundary_pts, base, radius);
        entry.width = fit.width;
        entry.direction = fit.direction;
        entry.usable = fit.width > opts.width_floor_factor * rep.resolution;
        rep.scales.push_back(std::move(entry));
    }

    // drift between consecutive non-omitted scales, sign-aligned
    for (std::size_t i = 0; i + 1 < rep.scales.size(); ++i) {
        const ScaleEntry& a = rep.scales[i];
        const ScaleEntry& b = rep.scales[i + 1];
        if (a.omitted || b.omitted) continue;
        Eigen::VectorXd vb = b.direction;
        if (a.direction.dot(vb) < 0.0) vb = -vb;
        rep.normals_drift.push_back((a.direction - vb).norm());
    }

    std::vector<double> ls, ws;
    for (const auto& e : rep.scales) {
        if (!e.usable) continue;
        ls.push_back(double(e.level));
        ws.push_back(std::log2(e.width));
    }
    rep.usable_scales = int(ls.size());
    if (ls.size() < 2) {
        rep.alpha_is_infinite = true;
        rep.alpha_fit = std::numeric_limits<double>::infinity();
    } else {
        LineFit lf = fit_line(ls, ws);
        rep.alpha_fit = -lf.slope - 1.0;
    }
    return rep;
}

} // namespace nmsurf
