#pragma once

#include <cmath>
#include <stdexcept>

#include "nmsurf/util/quadrature.hpp"
#include "nmsurf/util/special.hpp"

namespace nmsurf {

/// Normalization of the subordinated kernel: with K defined as the plain
/// time integral of the heat kernel against dt / t^{1+s/2} (no gamma-factor
/// prefactor), the flat kernel is value * |x-y|^{-(n+s)} with
///   value = 2^s * pi^{-n/2} * Gamma((n+s)/2).
/// Consumers wanting the normalized fractional Laplacian multiply by
/// 1/|Gamma(-s/2)| themselves.
struct KernelNormalization {
    int n = 1;
    double s = 0.5;
    double value = 0.0;

    KernelNormalization(int n_, double s_) : n(n_), s(s_) {
        if (n < 1) throw std::invalid_argument("KernelNormalization: n must be >= 1");
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("KernelNormalization: s in (0,1)");
        value = std::pow(2.0, s) * std::pow(M_PI, -0.5 * n) * std::tgamma(0.5 * (n + s));
    }
};

/// Independent route: numeric time quadrature of the Gaussian against
/// dt / t^{1+s/2} at metric distance `dist`. Geometric Gauss-Legendre panels
/// plus a two-term analytic remainder for the large-time power tail.
inline double kernel_time_quadrature(int n, double s, double dist) {
    if (dist <= 0.0) throw std::invalid_argument("kernel_time_quadrature: dist must be positive");
    const double d2 = dist * dist;
    const double a = 0.5 * (n + s);
    auto integrand = [&](double t) {
        return std::pow(t, -1.0 - 0.5 * s) * std::pow(4.0 * M_PI * t, -0.5 * n) *
               std::exp(-d2 / (4.0 * t));
    };
    const double t_lo = d2 / 2800.0; // exp underflows below this
    const double t_hi = d2 * 1e8;
    double core = integrate_geometric(integrand, t_lo, t_hi, 96, 24);
    // beyond t_hi: exp(-d2/4t) = 1 - d2/(4t) + O(t^-2)
    double tail = std::pow(4.0 * M_PI, -0.5 * n) *
                  (std::pow(t_hi, -a) / a - (d2 / 4.0) * std::pow(t_hi, -a - 1.0) / (a + 1.0));
    return core + tail;
}

/// Closed form vs quadrature self-check at unit distance.
inline void validate_normalization(const KernelNormalization& cns, double rel_tol = 1e-6) {
    double q = kernel_time_quadrature(cns.n, cns.s, 1.0);
    if (std::abs(q - cns.value) > rel_tol * std::abs(cns.value))
        throw std::runtime_error("KernelNormalization: quadrature check failed");
}

} // namespace nmsurf
