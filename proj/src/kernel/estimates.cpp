#include "nmsurf/kernel/estimates.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "nmsurf/kernel/constant.hpp"
#include "nmsurf/util/quadrature.hpp"
#include "nmsurf/util/special.hpp"

namespace nmsurf {

namespace {

void require_admissible(const MetricField& metric, double r) {
    VerificationGrid grid;
    grid.radius = std::max(1.0, 2.0 * r);
    grid.points_per_axis = 65;
    AdmissibilityReport rep = check_admissible(metric, r, grid);
    if (!rep.pass) throw std::invalid_argument("estimate: metric fails admissibility at this r");
}

} // namespace

L1DifferenceResult kernel_l1_difference(const MetricField& metric, const Eigen::VectorXd& y,
                                        double r, double s, NumericKernelOptions opts) {
    require_admissible(metric, r);
    auto model = KernelModel::numeric(std::make_shared<MetricField>(metric), s, r, opts);
    NumericKernelField field(model, y);

    L1DifferenceResult out;
    double acc = 0.0;
    for (int e = 0; e < field.grid().num_active(); ++e)
        acc += std::abs(field.diff_at(e));
    out.value = acc * field.grid().cell_volume();

    // outside the box both kernels obey power-law bounds; certify with the
    // frozen tail from the box core radius plus a comparable variable-metric
    // envelope (|z|_g >= |z|/sqrt(2))
    int n = metric.dim();
    double box_core = opts.box_core * r;
    double frozen_tail = tail_integral_constant(box_core, n, s);
    double envelope_factor = std::pow(2.0, 0.5 * (n + s));
    out.tail_budget = (1.0 + envelope_factor) * frozen_tail;
    out.budget = field.budget();
    return out;
}

MeasureDifferenceResult measure_difference_integral(const MetricField& metric,
                                                    const Eigen::VectorXd& y, double r, double s,
                                                    NumericKernelOptions opts) {
    require_admissible(metric, r);
    auto model = KernelModel::numeric(std::make_shared<MetricField>(metric), s, r, opts);
    NumericKernelField field(model, y);
    const HeatGrid& grid = field.grid();
    int n = metric.dim();
    double dy = std::sqrt(metric(y).determinant());

    MeasureDifferenceResult out;
    out.budget = field.budget();
    int src = grid.nearest_equation(field.source());
    for (int e = 0; e < grid.num_active(); ++e) {
        Eigen::VectorXd x = grid.coords_of_equation(e);
        if ((x - y).norm() >= r) continue;
        double w = std::abs(std::sqrt(metric(x).determinant()) - dy);
        if (e == src) {
            // the kernel is singular on this cell; the measure weight kills
            // the singularity, keep the closed-form cell mass as a budget
            double lip = metric.grad_bound() * n; // crude Lipschitz of sqrt(det)
            double hh = 0.5 * grid.h();
            double cell = (n == 1)
                              ? 2.0 * lip * field.cns() * std::pow(hh, 1.0 - s) / (1.0 - s)
                              : 2.0 * M_PI * lip * field.cns() * std::pow(hh, 1.0 - s) / (1.0 - s);
            out.center_cell_budget = cell;
            continue;
        }
        out.near_field += field.value_at(e) * w;
    }
    out.near_field *= grid.cell_volume();

    // sup of the measure asymmetry from the family's ellipticity window
    double b = std::max(std::pow(metric.upper(), 0.5 * n) - dy,
                        dy - std::pow(metric.lower(), 0.5 * n));
    double envelope_factor = std::pow(2.0, 0.5 * (n + s));
    out.tail_estimate = b * envelope_factor * tail_integral_constant(r, n, s);
    out.value = out.near_field + out.tail_estimate;
    return out;
}

DirichletKernelGapResult dirichlet_kernel_gap(const MetricField& metric, const Eigen::VectorXd& p,
                                              double r, double rho, double s,
                                              NumericKernelOptions opts) {
    if (!(rho < r)) throw std::invalid_argument("dirichlet_kernel_gap: need rho < r");
    require_admissible(metric, r);

    SolvePlan plan;
    plan.h = opts.h_rel * r;
    plan.theta = opts.theta;
    plan.padding = opts.padding;
    plan.substeps = opts.substeps;
    plan.tau = r * r / 1024.0;

    // GL-in-log-t nodes on [r^2/2^12, r^2]; below that the gap is
    // exponentially small in r^2/t
    double t_lo = r * r / 4096.0, t_hi = r * r;
    int octaves = 12;
    const QuadRule& rule = gauss_legendre(4);
    std::vector<double> times;
    std::vector<double> weights;
    double lo = std::log(t_lo), step = (std::log(t_hi) - lo) / octaves;
    for (int k = 0; k < octaves; ++k) {
        double a = lo + k * step, b = a + step;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            times.push_back(std::exp(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]));
            weights.push_back(rule.weights[i] * 0.5 * (b - a));
        }
    }

    auto samples = dirichlet_mass_gap(metric, p, r, rho, plan, times);
    DirichletKernelGapResult out;
    for (std::size_t i = 0; i < samples.size(); ++i)
        out.computed += weights[i] * std::pow(samples[i].t, -0.5 * s) * samples[i].gap;
    out.mass_tail = (2.0 / s) * std::pow(r, -s);
    out.value = out.computed + out.mass_tail;
    return out;
}

} // namespace nmsurf
