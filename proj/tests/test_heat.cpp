#include <doctest.h>

#include <cmath>

#include "nmsurf/heat/closed_form.hpp"
#include "nmsurf/heat/duhamel.hpp"
#include "nmsurf/heat/gaussian_fit.hpp"
#include "nmsurf/heat/solver.hpp"
#include "nmsurf/util/quadrature.hpp"

using namespace nmsurf;

namespace {
Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}
} // namespace

TEST_CASE("heat_constant reference values") {
    Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
    // prefactor only: t = 1/(4 pi), x = y
    CHECK(heat_constant(id1, 1.0 / (4.0 * M_PI), vec1(0.3), vec1(0.3)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // symmetry is exact
    CHECK(heat_constant(id1, 0.37, vec1(0.2), vec1(-0.9)) ==
          heat_constant(id1, 0.37, vec1(-0.9), vec1(0.2)));
    // g = 4 Id at |x-y| = 1 equals the Euclidean kernel at distance 2
    Eigen::MatrixXd g4 = 4.0 * Eigen::MatrixXd::Identity(1, 1);
    CHECK(heat_constant(g4, 1.0, vec1(0.0), vec1(1.0)) ==
          doctest::Approx(std::pow(4.0 * M_PI, -0.5) * std::exp(-1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(heat_constant(id1, 0.0, vec1(0), vec1(1)), std::invalid_argument);
}

TEST_CASE("heat_constant has unit mass against dV_g") {
    // quadrature against the metric volume for admissible constant metrics
    std::vector<Eigen::MatrixXd> metrics;
    metrics.push_back(Eigen::MatrixXd::Identity(1, 1));
    metrics.push_back(0.5 * Eigen::MatrixXd::Identity(1, 1));
    metrics.push_back(2.0 * Eigen::MatrixXd::Identity(1, 1));
    for (const auto& g : metrics) {
        for (double t : {0.01, 0.1, 1.0}) {
            double width = 12.0 * std::sqrt(t / g(0, 0));
            auto f = [&](double x) {
                return heat_constant(g, t, vec1(0.0), vec1(x)) * std::sqrt(g.determinant());
            };
            double mass = integrate_gl(f, -width, width, 48);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("solve_heat converges to the closed form at second order") {
    MetricField id = make_euclidean_metric(1);
    Eigen::VectorXd y = vec1(0.0);
    double t = 0.1;
    std::vector<double> errors;
    for (int lev : {64, 128, 256}) {
        SolvePlan plan;
        plan.h = 1.0 / lev;
        plan.tau = 1e-3;
        plan.substeps = 2 * lev / 16;
        HeatField f = solve_heat(id, plan, t, y, y, 3.0);
        double err = 0.0;
        for (int e = 0; e < f.grid.num_active(); ++e) {
            double ex = heat_constant(Eigen::MatrixXd::Identity(1, 1), t, y,
                                      f.grid.coords_of_equation(e));
            err = std::max(err, std::abs(f.values[e] - ex));
        }
        errors.push_back(err);
        CHECK(f.mass <= 1.0 + 1e-10);
        CHECK(f.min_value >= -1e-12);
    }
    CHECK(std::log2(errors[0] / errors[1]) >= 1.8);
    CHECK(std::log2(errors[1] / errors[2]) >= 1.8);
}

TEST_CASE("mass is non-increasing along the march") {
    MetricField sine = make_diag_sin_metric(1, 0.4, 1.0);
    SolvePlan plan;
    plan.h = 1.0 / 96.0;
    HeatGrid grid = HeatGrid::box(1, vec1(0.0), 4.0, plan.h);
    HeatPropagator prop(sine, grid, plan.theta);
    double prev = 1.0 + 1e-12;
    march_heat(prop, vec1(0.0), plan, {0.01, 0.02, 0.05, 0.1, 0.2, 0.5},
               [&](double, const Eigen::VectorXd& u) {
                   double m = prop.mass(u);
                   CHECK(m <= prev + 1e-12);
                   CHECK(m <= 1.0 + 1e-10);
                   prev = m;
               });
}

TEST_CASE("kernel symmetry from swapped solves") {
    // symmetric discretization: H(t, x0, x1) = H(t, x1, x0) to solver precision
    for (bool variable : {false, true}) {
        MetricField metric =
            variable ? make_diag_sin_metric(1, 0.4, 1.0) : make_euclidean_metric(1);
        SolvePlan plan;
        plan.h = 1.0 / 128.0;
        plan.substeps = 12;
        double t = 0.08;
        Eigen::VectorXd a = vec1(0.0), b = vec1(0.5), mid = vec1(0.25);
        HeatField fa = solve_heat(metric, plan, t, a, mid, 2.5);
        HeatField fb = solve_heat(metric, plan, t, b, mid, 2.5);
        double vab = fa.value_near(b), vba = fb.value_near(a);
        CHECK(std::abs(vab - vba) / vab < 1e-6);
    }
}

TEST_CASE("Dirichlet kernel is dominated by the whole-space kernel") {
    MetricField sine = make_diag_sin_metric(1, 0.4, 1.0);
    SolvePlan plan;
    plan.h = 1.0 / 96.0;
    Eigen::VectorXd p = vec1(0.0);
    HeatGrid full = HeatGrid::box(1, p, 3.0, plan.h);
    HeatGrid ball = HeatGrid::ball(1, p, 3.0, plan.h, p, 1.0);
    HeatPropagator pf(sine, full, plan.theta);
    HeatPropagator pb(sine, ball, plan.theta);
    Eigen::VectorXd uf, ub;
    march_heat(pf, p, plan, {0.05}, [&](double, const Eigen::VectorXd& u) { uf = u; });
    march_heat(pb, p, plan, {0.05}, [&](double, const Eigen::VectorXd& u) { ub = u; });
    for (int e = 0; e < ball.num_active(); ++e) {
        int node = ball.node_of_equation(e);
        int ef = full.equation(node % full.nx(), node / full.nx());
        CHECK(ub[e] <= uf[ef] + 1e-9);
    }
}

TEST_CASE("solve_heat rejects bad inputs") {
    MetricField id = make_euclidean_metric(1);
    SolvePlan plan;
    plan.h = 1.0 / 64.0;
    plan.tau = 0.01;
    // t below tau
    CHECK_THROWS_AS(solve_heat(id, plan, 0.001, vec1(0.0)), std::invalid_argument);
    // resolution check for theta < 1 without startup damping
    SolvePlan loose = plan;
    loose.rannacher_steps = 0;
    loose.theta = 0.5;
    loose.tau = 0.05;
    try {
        solve_heat(id, loose, 0.1, vec1(0.0));
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("tau <=") != std::string::npos);
    }
    // inadmissible metric
    MetricField big = make_constant_metric(3.0 * Eigen::MatrixXd::Identity(1, 1));
    CHECK_THROWS_AS(solve_heat(big, plan, 0.1, vec1(0.0)), std::invalid_argument);
}

TEST_CASE("duhamel difference vanishes identically for constant metrics") {
    MetricField g = make_constant_metric(1.3 * Eigen::MatrixXd::Identity(1, 1));
    SolvePlan plan;
    plan.h = 1.0 / 96.0;
    plan.substeps = 12;
    HeatField w = duhamel_difference(g, vec1(0.0), plan, 0.1);
    CHECK(l1_norm(w) < 1e-12); // the generator defect is exactly zero
}

TEST_CASE("duhamel route agrees with direct subtraction to 1e-3 relative L1") {
    MetricField sine = make_diag_sin_metric(1, 0.4, 1.0);
    SolvePlan plan;
    plan.h = 1.0 / 128.0;
    plan.substeps = 24;
    double t = 0.1, half = 4.0 * std::sqrt(2.0 * t) + 1.0;
    HeatField wd = duhamel_difference(sine, vec1(0.0), plan, t, half);
    HeatField dd = direct_difference(sine, vec1(0.0), plan, t, half);
    double gap = 0.0;
    for (int e = 0; e < wd.grid.num_active(); ++e)
        gap += std::abs(wd.values[e] - dd.values[e]);
    gap *= wd.grid.cell_volume();
    CHECK(gap / l1_norm(dd) <= 1e-3);
}

TEST_CASE("duhamel L1 norm grows like sqrt(t) at small times") {
    MetricField sine = make_diag_sin_metric(1, 0.4, 1.0);
    std::vector<double> ts{0.0125, 0.025, 0.05, 0.1}, ls, lt;
    for (double t : ts) {
        SolvePlan plan;
        plan.h = 1.0 / 128.0;
        plan.substeps = 12;
        HeatField dd = direct_difference(sine, vec1(0.0), plan, t, 4.0 * std::sqrt(0.2) + 1.0);
        double l1 = l1_norm(dd);
        CHECK(l1 <= 2.0); // min(2, C sqrt(t)/r) cap
        ls.push_back(std::log(l1));
        lt.push_back(std::log(t));
    }
    LineFit fit = fit_line(lt, ls);
    CHECK(std::abs(fit.slope - 0.5) < 0.1);
}

TEST_CASE("gaussian fit recovers the Euclidean constants") {
    std::vector<GaussianSample> samples;
    Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
    for (double t : {0.02, 0.05, 0.1, 0.3}) {
        for (double d : {0.0, 0.1, 0.3, 0.5, 0.9}) {
            samples.push_back({t, d, heat_constant(id1, t, vec1(0.0), vec1(d))});
        }
    }
    GaussianFit fit = gaussian_bound_fit(samples, 1);
    CHECK(fit.C == doctest::Approx(std::pow(4.0 * M_PI, -0.5)).epsilon(0.05));
    CHECK(fit.c == doctest::Approx(0.25).epsilon(0.05));
    CHECK(fit.pass);

    // g = 2 Id: the fit sees c = 1/2, and the class envelope with c = 1/8
    // holds because |x-y|_g^2 >= |x-y|^2 / 2 for admissible metrics
    std::vector<GaussianSample> g2;
    Eigen::MatrixXd two = 2.0 * Eigen::MatrixXd::Identity(1, 1);
    for (double t : {0.02, 0.1, 0.3})
        for (double d : {0.1, 0.4, 0.8})
            g2.push_back({t, d, heat_constant(two, t, vec1(0.0), vec1(d))});
    GaussianFit f2 = gaussian_bound_fit(g2, 1);
    CHECK(f2.c == doctest::Approx(0.5).epsilon(0.05));
    CHECK(f2.c >= 0.125);
    CHECK(gaussian_envelope_holds(g2, 1, std::pow(4.0 * M_PI, -0.5), 0.125, 1.0 + 1e-12));
}

TEST_CASE("gaussian fit rejects single-time samples") {
    std::vector<GaussianSample> samples;
    Eigen::MatrixXd id1 = Eigen::MatrixXd::Identity(1, 1);
    for (double d : {0.1, 0.2, 0.5})
        samples.push_back({0.1, d, heat_constant(id1, 0.1, vec1(0.0), vec1(d))});
    CHECK_THROWS_AS(gaussian_bound_fit(samples, 1), std::invalid_argument);
}

TEST_CASE("dirichlet gap: nonnegative, vanishing at small t, affine log-linear in r^2/t") {
    MetricField id = make_euclidean_metric(1);
    Eigen::VectorXd p = vec1(0.0);
    double r = 1.0, rho = 0.5;
    SolvePlan plan;
    plan.h = 1.0 / 96.0;
    plan.substeps = 10;
    std::vector<double> times{r * r / 16.0, r * r / 8.0, r * r / 4.0, r * r / 2.0, r * r};
    auto samples = dirichlet_mass_gap(id, p, r, rho, plan, times);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(samples[i].gap >= -1e-12);
        if (i > 0) CHECK(samples[i].gap >= samples[i - 1].gap); // grows with t
        xs.push_back(r * r / samples[i].t);
        ys.push_back(std::log(std::max(samples[i].gap, 1e-300)));
    }
    LineFit fit = fit_line(xs, ys);
    CHECK(fit.slope < 0.0);
    CHECK(fit.r2 >= 0.95);
    // t -> 0: the gap is exponentially small
    CHECK(samples.front().gap < 1e-4);
    CHECK_THROWS_AS(solve_heat_dirichlet_gap(id, p, r, rho, plan, 2.0 * r * r),
                    std::invalid_argument);
    CHECK_THROWS_AS(dirichlet_mass_gap(id, p, 0.5, 0.6, plan, times), std::invalid_argument);
}
