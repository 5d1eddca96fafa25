#include "nmsurf/flatness/harnack.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nmsurf/flatness/cylinder_fit.hpp"

namespace nmsurf {

DichotomyOutcome harnack_dichotomy_check(const std::vector<Eigen::VectorXd>& boundary_pts,
                                         double delta, int k, double alpha, double r) {
    if (boundary_pts.empty()) throw std::invalid_argument("harnack: empty boundary sample");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("harnack: delta in (0,1)");
    const int n = int(boundary_pts.front().size());
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);

    // hypothesis: trapping cylinders at every level up to k, each with its
    // own fitted direction
    for (int l = 0; l <= k; ++l) {
        double radius = r * std::pow(2.0, -l);
        double half_width = r * std::pow(2.0, -l * (1.0 + alpha));
        int inside = 0;
        for (const auto& p : boundary_pts)
            if (p.norm() <= radius) ++inside;
        if (inside < n) continue; // nothing to certify at this scale
        CylinderFit fit = fit_cylinder(boundary_pts, origin, radius);
        Cylinder cyl(origin, fit.direction, radius, half_width);
        if (!cylinder_contains(boundary_pts, cyl)) {
            std::ostringstream os;
            os << "harnack: hypothesis cylinder violated at scale l=" << l
               << " (fitted width " << fit.width << " > " << half_width << ")";
            throw std::invalid_argument(os.str());
        }
    }

    const double a = r * std::pow(2.0, -k * (1.0 + alpha));
    const double ball = r * std::pow(2.0, -k) * delta;
    const double cap = a * (1.0 - delta * delta);

    double top = -std::numeric_limits<double>::infinity();
    double bottom = std::numeric_limits<double>::infinity();
    Eigen::VectorXd top_pt, bottom_pt;
    for (const auto& p : boundary_pts) {
        if (p.norm() > ball) continue;
        double height = p[n - 1];
        if (height > top) { top = height; top_pt = p; }
        if (height < bottom) { bottom = height; bottom_pt = p; }
    }

    DichotomyOutcome out;
    out.delta = delta;
    if (!std::isfinite(top)) {
        // no sample in the dichotomy ball: both inclusions hold vacuously
        out.branch = DichotomyOutcome::Branch::Upper;
        out.both_hold = true;
        return out;
    }
    bool upper = top <= cap;
    bool lower = bottom >= -cap;
    if (upper) {
        out.branch = DichotomyOutcome::Branch::Upper;
        out.both_hold = lower;
    } else if (lower) {
        out.branch = DichotomyOutcome::Branch::Lower;
    } else {
        out.branch = DichotomyOutcome::Branch::Neither;
        out.witness = top_pt; // loud calibration failure for bounded-NMC sets
    }
    return out;
}

} // namespace nmsurf
