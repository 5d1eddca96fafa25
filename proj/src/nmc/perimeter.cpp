#include "nmsurf/nmc/perimeter.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nmsurf/kernel/normalization.hpp"

namespace nmsurf {

namespace {

/// exact double integral of |x-y|^{-1-s} over disjoint or touching
/// intervals [a,b] x [c,d] with c >= b
double pair_integral_1d(double a, double b, double c, double d, double s) {
    auto g = [s](double u) { return std::pow(std::max(u, 0.0), 1.0 - s); };
    return (g(c - a) - g(c - b) - g(d - a) + g(d - b)) / (s * (1.0 - s));
}

struct Level1d {
    double value = 0.0;
    double tail = 0.0;
};

Level1d perimeter_level_1d(const RegionSpec& region, double c0, double R, double s,
                           double kfac, int cells_in_window, double extent_factor) {
    const double delta = 2.0 * R / cells_in_window;
    FarField far = region.far_field(Eigen::VectorXd::Constant(1, c0));
    double X = std::max(extent_factor * R, 1.5 * (far.radius + std::abs(c0)));
    int m = int(std::ceil(2.0 * X / delta));
    double lo = c0 - 0.5 * m * delta;

    std::vector<double> sigma(static_cast<std::size_t>(m));
    std::vector<bool> in_omega(static_cast<std::size_t>(m));
    Eigen::VectorXd p(1);
    for (int i = 0; i < m; ++i) {
        double mid = lo + (i + 0.5) * delta;
        p[0] = mid;
        sigma[size_t(i)] = region.signed_at(p);
        in_omega[size_t(i)] = std::abs(mid - c0) < R;
    }

    Level1d out;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            if (sigma[size_t(i)] == sigma[size_t(j)]) continue;
            if (!in_omega[size_t(i)] && !in_omega[size_t(j)]) continue;
            double a = lo + i * delta, b = a + delta;
            double c = lo + j * delta, d = c + delta;
            out.value += 2.0 * kfac * pair_integral_1d(a, b, c, d, s);
        }
    }

    // far tails: both half-lines beyond the numeric window, where sigma is
    // frozen by the far-field description
    p[0] = lo + m * delta + 1e-9 + far.radius;
    double sig_right = region.signed_at(p);
    p[0] = lo - 1e-9 - far.radius;
    double sig_left = region.signed_at(p);
    double hi = lo + m * delta;
    for (int i = 0; i < m; ++i) {
        if (!in_omega[size_t(i)]) continue;
        double a = lo + i * delta, b = a + delta;
        if (sigma[size_t(i)] != sig_right) {
            // ∫_cell dx ∫_{hi}^∞ (y-x)^{-1-s} dy
            out.tail += 2.0 * kfac *
                        (std::pow(hi - a, 1.0 - s) - std::pow(hi - b, 1.0 - s)) /
                        (s * (1.0 - s));
        }
        if (sigma[size_t(i)] != sig_left) {
            out.tail += 2.0 * kfac *
                        (std::pow(b - lo, 1.0 - s) - std::pow(a - lo, 1.0 - s)) / (s * (1.0 - s));
        }
    }
    return out;
}

double perimeter_level_2d(const RegionSpec& region, const Eigen::VectorXd& c0, double R, double s,
                          double kfac, int cells_in_window, double extent_factor) {
    const double delta = 2.0 * R / cells_in_window;
    double X = extent_factor * R;
    int m = int(std::ceil(2.0 * X / delta));
    Eigen::VectorXd lo = c0.array() - 0.5 * m * delta;

    struct Cell { double x, y, sigma; bool in_omega; };
    std::vector<Cell> cells;
    cells.reserve(size_t(m) * size_t(m));
    Eigen::VectorXd p(2);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            Cell c;
            c.x = lo[0] + (i + 0.5) * delta;
            c.y = lo[1] + (j + 0.5) * delta;
            p[0] = c.x;
            p[1] = c.y;
            c.sigma = region.signed_at(p);
            c.in_omega = (p - c0).norm() < R;
            cells.push_back(c);
        }
    }
    double area2 = delta * delta * delta * delta;
    double acc = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const Cell &a = cells[i], &b = cells[j];
            if (a.sigma == b.sigma) continue;
            if (!a.in_omega && !b.in_omega) continue;
            double dx = a.x - b.x, dy = a.y - b.y;
            double d2 = dx * dx + dy * dy;
            if (d2 < 4.0 * delta * delta) {
                // near pair: 3x3 sub-sampling of the kernel, indicator frozen
                double sub = 0.0;
                for (int u = 0; u < 3; ++u)
                    for (int v = 0; v < 3; ++v)
                        for (int w = 0; w < 3; ++w)
                            for (int z = 0; z < 3; ++z) {
                                double ddx = dx + ((u - 1) - (w - 1)) * delta / 3.0;
                                double ddy = dy + ((v - 1) - (z - 1)) * delta / 3.0;
                                double dd = std::sqrt(ddx * ddx + ddy * ddy);
                                if (dd < delta / 6.0) dd = delta / 6.0;
                                sub += std::pow(dd, -(2.0 + s));
                            }
                acc += 2.0 * sub / 81.0 * area2;
            } else {
                acc += 2.0 * std::pow(std::sqrt(d2), -(2.0 + s)) * area2;
            }
        }
    }
    return kfac * acc;
}

} // namespace

PerimeterResult fractional_perimeter(const RegionSpec& region, const Eigen::VectorXd& omega_center,
                                     double omega_radius, const KernelModel& model,
                                     const PerimeterOptions& opts) {
    if (omega_radius <= 0.0)
        throw std::invalid_argument("fractional_perimeter: omega radius must be positive");
    if (model.kind != KernelModel::Kind::ConstantMetric)
        throw std::invalid_argument("fractional_perimeter: constant-metric models only");
    int n = region.dim;
    double s = model.s;
    KernelNormalization cns(n, s);

    // constant-metric kernel and volume factors collapse into one scalar
    double kfac = cns.value;
    if (n == 1) {
        double g = model.g_const(0, 0);
        kfac *= std::pow(g, -0.5 * (1.0 + s));
        if (!model.lebesgue_measure) kfac *= g;
    } else if ((model.g_const - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-14) {
        throw std::invalid_argument("fractional_perimeter: only isotropic metrics in dim 2");
    }

    PerimeterResult out;
    int cells = opts.base_cells;
    for (int level = 0; level < opts.levels; ++level, cells *= 2) {
        if (n == 1) {
            Level1d lv = perimeter_level_1d(region, omega_center[0], omega_radius, s, kfac, cells,
                                            opts.extent_factor);
            out.refinements.push_back(lv.value + lv.tail);
            out.tail = lv.tail;
        } else {
            out.refinements.push_back(
                perimeter_level_2d(region, omega_center, omega_radius, s, kfac, cells,
                                   opts.extent_factor));
        }
    }

    if (out.refinements.size() >= 2) {
        std::size_t k = out.refinements.size() - 1;
        double d_last = std::abs(out.refinements[k] - out.refinements[k - 1]);
        bool cauchy = true;
        for (std::size_t i = 2; i <= k; ++i) {
            double d_prev = std::abs(out.refinements[i - 1] - out.refinements[i - 2]);
            double d_cur = std::abs(out.refinements[i] - out.refinements[i - 1]);
            if (d_cur > d_prev * 1.05 + 1e-12) cauchy = false;
        }
        if (!cauchy) {
            std::ostringstream os;
            os << "fractional_perimeter: refinement did not converge; trace:";
            for (double v : out.refinements) os << " " << v;
            throw std::runtime_error(os.str());
        }
        out.converged = true;
        out.value = 2.0 * out.refinements[k] - out.refinements[k - 1];
        (void)d_last;
    } else {
        out.value = out.refinements.back();
        out.converged = true;
    }
    return out;
}

} // namespace nmsurf
