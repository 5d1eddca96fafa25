#pragma once

#include <cmath>
#include <boost/math/special_functions/gamma.hpp>

namespace nmsurf {

/// Area of the unit sphere S^{n-1} in R^n (= 2 for n = 1).
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Normalized upper incomplete gamma Q(a,x) = Γ(a,x)/Γ(a).
inline double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

/// Normalized lower incomplete gamma P(a,x) = γ(a,x)/Γ(a).
inline double gamma_p(double a, double x) { return boost::math::gamma_p(a, x); }

} // namespace nmsurf
