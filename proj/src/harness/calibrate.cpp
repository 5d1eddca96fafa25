#include "nmsurf/harness/calibrate.hpp"

#include <cmath>
#include <sstream>

#include "nmsurf/flatness/harnack.hpp"
#include "nmsurf/heat/gaussian_fit.hpp"
#include "nmsurf/kernel/constant.hpp"
#include "nmsurf/kernel/estimates.hpp"
#include "nmsurf/util/quadrature.hpp"

namespace nmsurf {

namespace {

void require_monotone(const std::vector<double>& radii, const std::vector<double>& values,
                      const std::string& what) {
    // values should grow as r shrinks (r^{-s} scaling); radii are descending
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[i - 1] * 0.999) {
            std::ostringstream os;
            os << "calibrate: non-monotone " << what << " sweep:";
            for (std::size_t k = 0; k < values.size(); ++k)
                os << " (r=" << radii[k] << ", v=" << values[k] << ")";
            throw std::runtime_error(os.str());
        }
    }
}

double sweep_constant(const std::vector<double>& radii, const std::vector<double>& values,
                      double s, double safety) {
    double c = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i)
        c = std::max(c, values[i] * std::pow(radii[i], s));
    return c * safety;
}

double sweep_slope(const std::vector<double>& radii, const std::vector<double>& values) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (values[i] <= 0.0) return 0.0;
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(values[i]));
    }
    return fit_line(lx, ly).slope;
}

/// dichotomy battery: oscillating graphs at the hypothesis flatness,
/// amplitudes up to the trapping width
bool delta_survives_battery(double delta, double alpha) {
    const double r = 1.0;
    const int k = 6;
    const double a = r * std::pow(2.0, -k * (1.0 + alpha));
    const double ball = r * std::pow(2.0, -k);
    for (double beta : {0.3, 0.6, 0.9, 1.0}) {
        for (double freq_scale : {1.0, 2.0, 0.5}) {
            std::vector<Eigen::VectorXd> pts;
            double w = freq_scale / (delta * ball);
            for (int i = 0; i <= 2048; ++i) {
                double x = -r + 2.0 * r * i / 2048.0;
                Eigen::VectorXd p(2);
                p[0] = x;
                p[1] = beta * a * std::sin(w * x);
                pts.push_back(p);
            }
            DichotomyOutcome out;
            try {
                out = harnack_dichotomy_check(pts, delta, k, alpha, r);
            } catch (const std::invalid_argument&) {
                continue; // hypothesis cylinders not satisfied: not a counterexample
            }
            if (out.branch == DichotomyOutcome::Branch::Neither) return false;
        }
    }
    return true;
}

} // namespace

Calibration calibrate_family(const MetricConfig& metric, int dim, double s, double alpha,
                             const CalibrateOptions& opts) {
    Calibration cal;
    cal.n = dim;
    cal.s = s;
    cal.family = metric.family;
    cal.C_tail = unit_sphere_area(dim) * KernelNormalization(dim, s).value / s;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
    bool constant_family = metric.family == "euclidean" || metric.family == "constant";

    std::vector<double> eff_vals, meas_vals, dir_vals;
    for (double r : opts.radii) {
        MetricField g = metric.build(dim, r);
        if (constant_family) {
            eff_vals.push_back(0.0);
            meas_vals.push_back(0.0);
        } else {
            eff_vals.push_back(kernel_l1_difference(g, y, r, s, opts.kernel).value);
            meas_vals.push_back(measure_difference_integral(g, y, r, s, opts.kernel).near_field);
        }
        dir_vals.push_back(
            dirichlet_kernel_gap(g, y, r, 0.5 * r, s, opts.kernel).computed);
    }
    if (!constant_family) {
        require_monotone(opts.radii, eff_vals, "kernel-freezing");
        require_monotone(opts.radii, meas_vals, "measure-difference");
        cal.C_effacement = sweep_constant(opts.radii, eff_vals, s, opts.safety);
        cal.C_measure = sweep_constant(opts.radii, meas_vals, s, opts.safety);
        cal.effacement_slope = sweep_slope(opts.radii, eff_vals);
        cal.measure_slope = sweep_slope(opts.radii, meas_vals);
    }
    require_monotone(opts.radii, dir_vals, "dirichlet-gap");
    cal.C_dirichlet = sweep_constant(opts.radii, dir_vals, s, opts.safety);
    cal.dirichlet_slope = sweep_slope(opts.radii, dir_vals);

    // Gaussian envelope over the family sweep
    std::vector<GaussianSample> samples;
    SolvePlan plan;
    plan.h = 1.0 / 96.0;
    for (double t : {0.02, 0.05, 0.1, 0.2}) {
        MetricField g = metric.build(dim, 1.0);
        HeatField f = solve_heat(g, plan, t, y);
        collect_gaussian_samples(f, 6.0 * std::sqrt(t), 1e-12, samples);
    }
    GaussianFit fit = gaussian_bound_fit(samples, dim, 4.0);
    cal.gauss_C = fit.C * std::exp(std::max(0.0, fit.max_log_residual)) * opts.gauss_slack;
    cal.gauss_c = fit.c;

    // dichotomy constant: the largest delta surviving the oscillation
    // battery, halved for margin
    double accepted = opts.delta_grid.back();
    for (double d : opts.delta_grid) {
        if (delta_survives_battery(d, alpha)) {
            accepted = d;
            break;
        }
    }
    cal.delta_harnack = std::max(0.5 * accepted, 0.05);
    cal.k0 = int(std::ceil(std::log2(1.0 / cal.delta_harnack) / alpha));
    return cal;
}

} // namespace nmsurf
