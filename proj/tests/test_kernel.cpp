#include <doctest.h>

#include <cmath>

#include "nmsurf/core/metric.hpp"
#include "nmsurf/kernel/constant.hpp"
#include "nmsurf/kernel/calibration.hpp"
#include "nmsurf/kernel/estimates.hpp"
#include "nmsurf/kernel/model.hpp"
#include "nmsurf/kernel/normalization.hpp"
#include "nmsurf/util/quadrature.hpp"
#include "nmsurf/util/rng.hpp"

using namespace nmsurf;

namespace {
Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}
Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}
} // namespace

TEST_CASE("kernel normalization: closed form matches the Gamma substitution") {
    // n=1, s=1/2: 2^{1/2} pi^{-1/2} Gamma(3/4)
    KernelNormalization c(1, 0.5);
    CHECK(c.value == doctest::Approx(std::sqrt(2.0 / M_PI) * std::tgamma(0.75)).epsilon(1e-14));
    CHECK(c.value == doctest::Approx(0.9778).epsilon(2e-4));
}

TEST_CASE("kernel normalization validates against the time quadrature") {
    for (int n : {1, 2}) {
        for (double s : {0.3, 0.5, 0.7}) {
            KernelNormalization c(n, s);
            CHECK_NOTHROW(validate_normalization(c, 1e-6));
            // and at non-unit distances the quadrature reproduces the power law
            for (double d : {0.37, 2.11}) {
                double quad = kernel_time_quadrature(n, s, d);
                CHECK(quad == doctest::Approx(c.value * std::pow(d, -double(n + s))).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("kernel_constant reference values and symmetry") {
    Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
    double v = kernel_constant(id1, vec1(0.0), vec1(1.0), 0.5);
    CHECK(v == doctest::Approx(0.9778).epsilon(2e-4));

    // homogeneity K(2x, 2y) = 2^{-(n+s)} K(x, y)
    Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
    double base = kernel_constant(id2, vec2(0.3, -0.2), vec2(-0.5, 0.9), 0.5);
    double scaled = kernel_constant(id2, vec2(0.6, -0.4), vec2(-1.0, 1.8), 0.5);
    CHECK(scaled == doctest::Approx(std::pow(2.0, -2.5) * base).epsilon(1e-12));

    // g = 4 Id doubles distances: value = 2^{-(1+s)} x Euclidean
    Eigen::MatrixXd g4 = 4.0 * Eigen::MatrixXd::Identity(1, 1);
    double v4 = kernel_constant(g4, vec1(0.0), vec1(1.0), 0.5);
    CHECK(v4 == doctest::Approx(std::pow(2.0, -1.5) * v).epsilon(1e-12));

    // exact symmetry
    Eigen::MatrixXd g(2, 2);
    g << 1.4, 0.3, 0.3, 0.9;
    CHECK(kernel_constant(g, vec2(0.2, 0.7), vec2(-0.4, 0.1), 0.3) ==
          kernel_constant(g, vec2(-0.4, 0.1), vec2(0.2, 0.7), 0.3));

    CHECK_THROWS_AS(kernel_constant(id1, vec1(0.5), vec1(0.5), 0.5), std::invalid_argument);
}

TEST_CASE("tail integral closed form and radial quadrature oracle") {
    // n=1: omega_0 = 2, value = 2 cns r^{-s} / s
    KernelNormalization c(1, 0.5);
    CHECK(tail_integral_constant(1.0, 1, 0.5) == doctest::Approx(4.0 * c.value).epsilon(1e-12));

    // doubling r multiplies by 2^{-s}
    for (double s : {0.3, 0.7}) {
        double ratio = tail_integral_constant(2.0, 1, s) / tail_integral_constant(1.0, 1, s);
        CHECK(ratio == doctest::Approx(std::pow(2.0, -s)).epsilon(1e-12));
    }

    // numeric radial quadrature over {r < |x| < 100 r} vs the closed form of
    // the same shell, to 1e-4 relative
    for (int n : {1, 2}) {
        for (double s : {0.3, 0.5, 0.7}) {
            KernelNormalization cns(n, s);
            double r = 0.7;
            auto radial = [&](double rho) {
                return unit_sphere_area(n) * cns.value * std::pow(rho, double(n - 1)) *
                       std::pow(rho, -double(n) - s);
            };
            double numeric = integrate_geometric(radial, r, 100.0 * r, 48, 16);
            double closed = tail_integral_constant(r, n, s) - tail_integral_constant(100.0 * r, n, s);
            CHECK(numeric == doctest::Approx(closed).epsilon(1e-4));
        }
    }
}

TEST_CASE("tail integral homogeneity: value(r) r^s constant over a sweep") {
    double ref = tail_integral_constant(1.0, 2, 0.4);
    for (double r : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        double v = tail_integral_constant(r, 2, 0.4) * std::pow(r, 0.4);
        CHECK(v == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("numeric kernel matches the closed form for a constant metric") {
    // frozen = exact for constant metrics: the correction field is solver
    // noise and must sit inside the error budget
    auto metric = std::make_shared<MetricField>(make_euclidean_metric(1));
    NumericKernelOptions opts;
    opts.h_rel = 1.0 / 48.0;
    opts.tmax_factor = 16.0;
    KernelModel model = KernelModel::numeric(metric, 0.5, 1.0, opts);
    NumericKernelField field(model, vec1(0.0));

    Rng rng(5);
    Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
    for (int k = 0; k < 20; ++k) {
        double x = rng.uniform(0.2, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        KernelPointValue v = kernel_numeric(field, vec1(x));
        double exact = kernel_constant(id1, vec1(x), vec1(0.0), 0.5);
        CHECK(std::abs(v.value - exact) <= v.error_budget.total() + 1e-6 * exact);
        CHECK(v.small_t_part <= exact * (1.0 + 1e-9));
        CHECK(v.large_t_part <= (2.0 / 0.5) * std::pow(field.t_max(), -0.25) + 1e-12);
    }
    CHECK_THROWS_AS(kernel_numeric(field, vec1(0.0)), std::invalid_argument); // singular
    CHECK_THROWS_AS(kernel_numeric(field, vec1(1e9)), std::invalid_argument);  // outside box
}

TEST_CASE("numeric kernel agrees with a refined reference on a variable metric") {
    MetricField sine = make_diag_sin_metric(1, 0.4, 1.0);
    auto metric = std::make_shared<MetricField>(sine);
    NumericKernelOptions coarse;
    coarse.h_rel = 1.0 / 32.0;
    coarse.tmax_factor = 16.0;
    NumericKernelOptions fine = coarse;
    fine.h_rel = 1.0 / 64.0;
    fine.nodes_per_octave = 8;

    NumericKernelField fc(KernelModel::numeric(metric, 0.5, 1.0, coarse), vec1(0.0));
    NumericKernelField ff(KernelModel::numeric(metric, 0.5, 1.0, fine), vec1(0.0));
    double x = 0.5;
    double vc = kernel_numeric(fc, vec1(x)).value;
    double vf = kernel_numeric(ff, vec1(x)).value;
    double budget = fc.budget().mid_quadrature + ff.budget().mid_quadrature;
    CHECK(std::abs(vc - vf) <= std::max(budget, 2e-3 * std::abs(vf)));
}

TEST_CASE("kernel freezing gap vanishes for constant metrics") {
    MetricField id = make_euclidean_metric(1);
    NumericKernelOptions opts;
    opts.h_rel = 1.0 / 32.0;
    opts.tmax_factor = 8.0;
    L1DifferenceResult res = kernel_l1_difference(id, vec1(0.0), 1.0, 0.5, opts);
    CHECK(res.value < 5e-3); // solver noise only
}

TEST_CASE("measure difference integrand is nonnegative and vanishes for constant metrics") {
    MetricField id = make_euclidean_metric(1);
    NumericKernelOptions opts;
    opts.h_rel = 1.0 / 32.0;
    opts.tmax_factor = 8.0;
    MeasureDifferenceResult res = measure_difference_integral(id, vec1(0.0), 1.0, 0.5, opts);
    CHECK(res.near_field >= 0.0);
    CHECK(res.near_field < 1e-12);
    CHECK(res.value < 1e-12);
}

TEST_CASE("estimate preconditions reject inadmissible metrics") {
    MetricField too_big = make_constant_metric(3.0 * Eigen::MatrixXd::Identity(1, 1));
    CHECK_THROWS_AS(kernel_l1_difference(too_big, vec1(0.0), 1.0, 0.5), std::invalid_argument);
    MetricField steep = make_diag_sin_metric(1, 0.4, 8.0); // r ||Dg|| = 3.2 > 1
    CHECK_THROWS_AS(measure_difference_integral(steep, vec1(0.0), 1.0, 0.5),
                    std::invalid_argument);
}

TEST_CASE("calibration io round-trips and refuses silent overwrite") {
    Calibration cal;
    cal.n = 1;
    cal.s = 0.5;
    cal.family = "diag_sin";
    cal.C_effacement = 1.25;
    cal.C_tail = tail_integral_constant(1.0, 1, 0.5);
    std::string path = "/tmp/nmsurf_test_calibration.json";
    std::remove(path.c_str());
    cal.save(path);
    Calibration back = Calibration::load(path);
    CHECK(back.C_effacement == cal.C_effacement);
    CHECK(back.family == cal.family);
    CHECK_THROWS_AS(cal.save(path), std::runtime_error);
    CHECK_NOTHROW(cal.save(path, /*overwrite=*/true));
    std::remove(path.c_str());
}
