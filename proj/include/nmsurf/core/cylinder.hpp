#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace nmsurf {

/// Slab-in-a-ball: {|x - center| <= radius} cap {|(x - center) . direction| <= half_width}.
struct Cylinder {
    Eigen::VectorXd center;
    Eigen::VectorXd direction; // unit
    double radius = 1.0;
    double half_width = 0.0;

    Cylinder(Eigen::VectorXd c, Eigen::VectorXd dir, double r, double hw)
        : center(std::move(c)), direction(std::move(dir)), radius(r), half_width(hw) {
        double nn = direction.norm();
        if (nn <= 0.0) throw std::invalid_argument("Cylinder: zero direction");
        direction /= nn;
        if (half_width < 0.0) throw std::invalid_argument("Cylinder: negative half width");
    }
};

/// True iff every point of the cloud inside the ball lies within the slab.
inline bool cylinder_contains(const std::vector<Eigen::VectorXd>& boundary_pts,
                              const Cylinder& cyl) {
    for (const auto& p : boundary_pts) {
        Eigen::VectorXd d = p - cyl.center;
        if (d.norm() <= cyl.radius && std::abs(d.dot(cyl.direction)) > cyl.half_width)
            return false;
    }
    return true;
}

} // namespace nmsurf
