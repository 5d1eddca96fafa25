#include <doctest.h>

#include <cmath>

#include "nmsurf/core/chart.hpp"
#include "nmsurf/core/cylinder.hpp"
#include "nmsurf/core/metric.hpp"
#include "nmsurf/core/region.hpp"
#include "nmsurf/util/rng.hpp"

using namespace nmsurf;

namespace {
Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}
Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}
} // namespace

TEST_CASE("metric_norm on reference matrices") {
    CHECK(metric_norm(Eigen::MatrixXd::Identity(2, 2), vec2(3, 4)) == doctest::Approx(5.0));
    CHECK(metric_norm(4.0 * Eigen::MatrixXd::Identity(1, 1), vec1(1)) == doctest::Approx(2.0));
    Eigen::MatrixXd g(2, 2);
    g << 2.0, 0.0, 0.0, 0.5;
    CHECK(metric_norm(g, vec2(1, 0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("metric_norm rejects non-SPD input") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(metric_norm(bad, vec2(1, 1)), std::invalid_argument);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(metric_norm(asym, vec2(1, 1)), std::invalid_argument);
}

TEST_CASE("metric_norm homogeneity and triangle inequality on random samples") {
    Rng rng(42);
    Eigen::MatrixXd g(2, 2);
    g << 1.3, 0.2, 0.2, 0.8;
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd v = vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
        Eigen::VectorXd w = vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
        double lam = rng.uniform(-4, 4);
        CHECK(metric_norm(g, lam * v) ==
              doctest::Approx(std::abs(lam) * metric_norm(g, v)).epsilon(1e-12));
        CHECK(metric_norm(g, v + w) <= metric_norm(g, v) + metric_norm(g, w) + 1e-12);
    }
}

TEST_CASE("check_admissible on the reference metrics") {
    AdmissibilityReport id = check_admissible(make_euclidean_metric(2), 1.0);
    CHECK(id.pass);
    CHECK(id.min_eigenvalue == doctest::Approx(1.0));
    CHECK(id.max_eigenvalue == doctest::Approx(1.0));

    AdmissibilityReport big =
        check_admissible(make_constant_metric(3.0 * Eigen::MatrixXd::Identity(2, 2)), 1.0);
    CHECK_FALSE(big.pass); // upper bound 2 violated

    // g(x) = (1 + 0.4 sin x) Id on R^1: analytic worst Lipschitz is 0.4
    MetricField sine = make_diag_sin_metric(1, 0.4, 1.0);
    AdmissibilityReport rep = check_admissible(sine, 1.0);
    CHECK(rep.pass);
    CHECK(rep.worst_lipschitz == doctest::Approx(0.4).epsilon(1e-9));

    // finite differences agree with the analytic gradient on a grid
    for (double x : {-0.7, 0.0, 0.3, 0.9}) {
        double fd = lipschitz_fd_estimate(sine, vec1(x));
        double an = 0.4 * std::abs(std::cos(x));
        CHECK(fd == doctest::Approx(an).epsilon(1e-6));
        CHECK(sine.grad_bound() >= fd - 1e-8);
    }
}

TEST_CASE("check_admissible passes for the identity at every r in (0,1]") {
    for (double r : {0.03125, 0.125, 0.5, 1.0})
        CHECK(check_admissible(make_euclidean_metric(1), r).pass);
}

TEST_CASE("check_admissible rejects an empty verification grid") {
    VerificationGrid grid;
    grid.points_per_axis = 0;
    CHECK_THROWS_AS(check_admissible(make_euclidean_metric(1), 1.0, grid),
                    std::invalid_argument);
}

TEST_CASE("flatness assumption on reference charts") {
    MetricField id2 = make_euclidean_metric(2);
    CHECK(check_flatness_assumption(make_identity_chart(2, 1.0), id2, 1.0).pass);

    MetricField inflated = make_constant_metric(1.02 * Eigen::MatrixXd::Identity(2, 2));
    CHECK_FALSE(check_flatness_assumption(make_identity_chart(2, 1.0), inflated, 1.0).pass);

    // phi(x) = x + beta x |x|^2: decided by the grid maximum of
    // ||Dphi^T Dphi - Id||, cross-checked against a finite-difference Jacobian
    ChartSpec chart = make_radial_cubic_chart(2, 0.001, 1.0);
    FlatnessCheck chk = check_flatness_assumption(chart, id2, 1.0);
    double fd_worst = 0.0;
    const double h = 1e-6;
    for (double x : {-0.9, -0.4, 0.2, 0.8}) {
        for (double y : {-0.8, 0.1, 0.7}) {
            Eigen::VectorXd p = vec2(x, y);
            Eigen::MatrixXd jfd(2, 2);
            for (int k = 0; k < 2; ++k) {
                Eigen::VectorXd pp = p, pm = p;
                pp[k] += h;
                pm[k] -= h;
                jfd.col(k) = (chart.map(pp) - chart.map(pm)) / (2.0 * h);
            }
            Eigen::MatrixXd dev = jfd.transpose() * jfd - Eigen::MatrixXd::Identity(2, 2);
            fd_worst = std::max(fd_worst, dev.cwiseAbs().maxCoeff());
            CHECK((chart.jacobian(p) - jfd).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    // beta = 0.001: the C^0 deviation stays below 1/100 (grid max ~ 6 beta)
    // but the scaled C^1 bound fails (max derivative ~ 12 beta r = 0.012),
    // so the verdict is decided by the gradient part of the grid maximum
    CHECK(fd_worst < 0.01);
    CHECK(chk.sup_deviation == doctest::Approx(fd_worst).epsilon(1e-3));
    CHECK(chk.sup_deviation < 0.01);
    CHECK(chk.sup_scaled_grad > 0.01);
    CHECK_FALSE(chk.pass);
    // halving beta brings the derivative under the bound as well
    CHECK(check_flatness_assumption(make_radial_cubic_chart(2, 0.0005, 1.0), id2, 1.0).pass);
    // a ten-fold larger perturbation breaks the C^0 bound too
    FlatnessCheck big = check_flatness_assumption(make_radial_cubic_chart(2, 0.01, 1.0), id2, 1.0);
    CHECK(big.sup_deviation > 0.01);
    CHECK_FALSE(big.pass);
}

TEST_CASE("flatness assumption rejects r beyond the chart domain") {
    CHECK_THROWS_AS(
        check_flatness_assumption(make_identity_chart(2, 0.5), make_euclidean_metric(2), 1.0),
        std::invalid_argument);
}

TEST_CASE("cylinder_contains on reference clouds") {
    std::vector<Eigen::VectorXd> on_axis;
    for (double x : {-0.9, -0.3, 0.2, 0.8}) on_axis.push_back(vec2(x, 0.0));
    Cylinder cyl(vec2(0, 0), vec2(0, 1), 1.0, 0.0);
    CHECK(cylinder_contains(on_axis, cyl));

    std::vector<Eigen::VectorXd> high{vec2(0.1, 0.3)};
    Cylinder narrow(vec2(0, 0), vec2(0, 1), 1.0, 0.2);
    CHECK_FALSE(cylinder_contains(high, narrow));

    // graph of 0.1 sin(5x): sup-height 0.1 is attained, so width 0.1 passes
    std::vector<Eigen::VectorXd> wave;
    for (int i = 0; i <= 400; ++i) {
        double x = -1.0 + 2.0 * i / 400.0;
        wave.push_back(vec2(x, 0.1 * std::sin(5.0 * x)));
    }
    CHECK(cylinder_contains(wave, Cylinder(vec2(0, 0), vec2(0, 1), 1.0, 0.1)));
    CHECK_FALSE(cylinder_contains(wave, Cylinder(vec2(0, 0), vec2(0, 1), 1.0, 0.09)));
}

TEST_CASE("cylinder_contains is monotone in the half width") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Eigen::VectorXd> cloud;
        for (int i = 0; i < 40; ++i)
            cloud.push_back(vec2(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3)));
        double w = rng.uniform(0.0, 0.4);
        Cylinder a(vec2(0, 0), vec2(0, 1), 1.0, w);
        Cylinder b(vec2(0, 0), vec2(0, 1), 1.0, w + rng.uniform(0.0, 0.3));
        if (cylinder_contains(cloud, a)) CHECK(cylinder_contains(cloud, b));
    }
}

TEST_CASE("signed indicator convention: +1 inside E") {
    RegionSpec hs = make_half_space(vec2(0, 1), 0.0); // E = {x2 < 0}
    CHECK(hs.signed_at(vec2(0.3, -0.5)) == 1.0);
    CHECK(hs.signed_at(vec2(0.3, 0.5)) == -1.0);

    RegionSpec ball = make_ball_region(vec2(0, 0), 1.0);
    CHECK(ball.signed_at(vec2(0.5, 0.0)) == 1.0);
    CHECK(ball.signed_at(vec2(1.5, 0.0)) == -1.0);
    CHECK(ball.complemented().signed_at(vec2(0.5, 0.0)) == -1.0);

    GraphFn f = GraphFn::from_callable([](double x) { return 0.1 * x; }, -2, 2, 65, 0.2);
    RegionSpec sub = make_subgraph_region(f);
    CHECK(sub.signed_at(vec2(1.0, 0.0)) == 1.0);  // below the graph
    CHECK(sub.signed_at(vec2(1.0, 0.2)) == -1.0); // above
}

TEST_CASE("circle occupation is exact for half spaces and balls") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd nu = rng.unit_vector(2);
        double off = rng.uniform(-0.5, 0.5);
        RegionSpec hs = make_half_space(nu, off);
        Eigen::VectorXd y = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
        double rho = rng.uniform(0.05, 2.0);
        AngularSet set = hs.circle_inside(y, rho);
        // midpoint sampling oracle
        int m = 20000, inside = 0;
        for (int i = 0; i < m; ++i) {
            double phi = 2.0 * M_PI * (i + 0.5) / m;
            Eigen::VectorXd p = vec2(y[0] + rho * std::cos(phi), y[1] + rho * std::sin(phi));
            if (hs.signed_at(p) > 0) ++inside;
        }
        CHECK(std::abs(set.measure() - 2.0 * M_PI * inside / double(m)) < 2e-3);
    }
    RegionSpec ball = make_ball_region(vec2(0.2, -0.1), 0.8);
    AngularSet set = ball.circle_inside(vec2(1.0, -0.1), 0.5);
    int m = 40000, inside = 0;
    for (int i = 0; i < m; ++i) {
        double phi = 2.0 * M_PI * (i + 0.5) / m;
        Eigen::VectorXd p = vec2(1.0 + 0.5 * std::cos(phi), -0.1 + 0.5 * std::sin(phi));
        if (ball.signed_at(p) > 0) ++inside;
    }
    CHECK(std::abs(set.measure() - 2.0 * M_PI * inside / double(m)) < 1e-3);
}

TEST_CASE("boolean regions compose indicators and circle sets") {
    RegionSpec lens = make_boolean_region(
        BooleanRegion::Op::Intersection,
        {make_ball_region(vec2(-0.3, 0), 1.0), make_ball_region(vec2(0.3, 0), 1.0)});
    CHECK(lens.signed_at(vec2(0, 0)) == 1.0);
    CHECK(lens.signed_at(vec2(0.9, 0)) == -1.0);
    AngularSet set = lens.circle_inside(vec2(0, 0), 0.5);
    int m = 20000, inside = 0;
    for (int i = 0; i < m; ++i) {
        double phi = 2.0 * M_PI * (i + 0.5) / m;
        if (lens.signed_at(vec2(0.5 * std::cos(phi), 0.5 * std::sin(phi))) > 0) ++inside;
    }
    CHECK(std::abs(set.measure() - 2.0 * M_PI * inside / double(m)) < 2e-3);
}

TEST_CASE("subgraph circle intersection matches dense sampling") {
    GraphFn f = GraphFn::from_callable([](double x) { return 0.2 * std::sin(3.0 * x); }, -4, 4,
                                       513, 0.2);
    RegionSpec sub = make_subgraph_region(f);
    Eigen::VectorXd y = vec2(0.3, f.eval(0.3));
    for (double rho : {0.1, 0.7, 2.0}) {
        AngularSet set = sub.circle_inside(y, rho);
        int m = 20000, inside = 0;
        for (int i = 0; i < m; ++i) {
            double phi = 2.0 * M_PI * (i + 0.5) / m;
            if (sub.signed_at(vec2(y[0] + rho * std::cos(phi), y[1] + rho * std::sin(phi))) > 0)
                ++inside;
        }
        CHECK(std::abs(set.measure() - 2.0 * M_PI * inside / double(m)) < 3e-3);
    }
}

TEST_CASE("GraphFn interpolation is exact on quadratics, fourth order on smooth data") {
    GraphFn quad = GraphFn::from_callable(
        [](double x) { return 1.0 + 0.5 * x - 0.25 * x * x; }, -2, 2, 33, 4.0);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform(-1.9, 1.9);
        double exact = 1.0 + 0.5 * x - 0.25 * x * x;
        CHECK(quad.eval(x) == doctest::Approx(exact).epsilon(1e-12));
    }
    // smooth data: interpolation error shrinks ~16x under grid doubling
    auto smooth = [](double x) { return std::sin(2.0 * x); };
    double errs[2];
    int idx = 0;
    for (int n : {65, 129}) {
        GraphFn f = GraphFn::from_callable(smooth, -2, 2, n, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 400; ++i) {
            double x = -1.9 + 3.8 * i / 399.0;
            worst = std::max(worst, std::abs(f.eval(x) - smooth(x)));
        }
        errs[idx++] = worst;
    }
    CHECK(errs[0] / errs[1] > 7.0);
}

TEST_CASE("1-d jump radii split the paired integrand exactly") {
    RegionSpec ray = make_half_space(vec1(1.0), 0.4); // E = {x < 0.4}
    auto jumps = ray.jump_radii(0.1);
    REQUIRE(jumps.size() == 1);
    CHECK(jumps[0] == doctest::Approx(0.3));
    CHECK(ray.pair_sum(0.1, 0.1) == 2);  // both sides inside E
    CHECK(ray.pair_sum(0.1, 0.5) == 0);  // one in, one out
}
