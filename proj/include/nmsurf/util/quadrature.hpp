#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nmsurf {

struct QuadRule {
    std::vector<double> nodes;   // on [-1,1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1,1], nodes by Newton iteration on P_m.
inline const QuadRule& gauss_legendre(int m) {
    static thread_local std::vector<QuadRule> cache(65);
    if (m < 1 || m > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    QuadRule& r = cache[static_cast<std::size_t>(m)];
    if (!r.nodes.empty()) return r;
    r.nodes.resize(m);
    r.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[m - 1 - i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[m - 1 - i] = r.weights[i];
    }
    return r;
}

/// ∫_a^b f, fixed-order Gauss-Legendre.
inline double integrate_gl(const std::function<double(double)>& f, double a, double b, int order = 16) {
    const QuadRule& r = gauss_legendre(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * f(mid + half * r.nodes[i]);
    return acc * half;
}

/// ∫_a^b f over a geometric subdivision (useful for power-law integrands).
/// Requires 0 < a < b.
inline double integrate_geometric(const std::function<double(double)>& f, double a, double b,
                                  int segments, int order = 16) {
    if (!(a > 0.0 && b > a)) throw std::invalid_argument("integrate_geometric: need 0 < a < b");
    double ratio = std::pow(b / a, 1.0 / segments);
    double lo = a, acc = 0.0;
    for (int k = 0; k < segments; ++k) {
        double hi = (k + 1 == segments) ? b : lo * ratio;
        acc += integrate_gl(f, lo, hi, order);
        lo = hi;
    }
    return acc;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need at least two samples");
    double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i];
        sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    double vx = sxx - sx * sx / n;
    double cxy = sxy - sx * sy / n;
    double vy = syy - sy * sy / n;
    if (vx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = cxy / vx;
    f.intercept = (sy - f.slope * sx) / n;
    f.r2 = (vy > 0.0) ? (cxy * cxy) / (vx * vy) : 1.0;
    return f;
}

} // namespace nmsurf
