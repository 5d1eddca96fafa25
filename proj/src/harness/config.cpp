#include "nmsurf/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nmsurf {

using ordered_json = nlohmann::ordered_json;

std::function<double(double)> ProfileConfig::callable() const {
    if (family == "zero") return [](double) { return 0.0; };
    if (family == "linear") {
        double a = slope, b = intercept;
        return [a, b](double x) { return a * x + b; };
    }
    if (family == "sin") {
        double a = amplitude, w = frequency, p = phase;
        return [a, w, p](double x) { return a * std::sin(w * x + p); };
    }
    if (family == "cos") {
        double a = amplitude, w = frequency, p = phase;
        return [a, w, p](double x) { return a * std::cos(w * x + p); };
    }
    if (family == "abs_power") {
        double a = amplitude, e = exponent;
        return [a, e](double x) { return a * std::pow(std::abs(x), e); };
    }
    if (family == "parabola") {
        double a = amplitude;
        return [a](double x) { return a * x * x; };
    }
    throw std::invalid_argument("profile: unknown family '" + family + "'");
}

double ProfileConfig::bound_on(double radius) const {
    if (family == "zero") return 0.0;
    if (family == "sin" || family == "cos") return std::abs(amplitude);
    if (family == "linear") return std::abs(slope) * radius + std::abs(intercept);
    if (family == "abs_power") return std::abs(amplitude) * std::pow(radius, exponent);
    if (family == "parabola") return std::abs(amplitude) * radius * radius;
    throw std::invalid_argument("profile: unknown family '" + family + "'");
}

MetricField MetricConfig::build(int dim, double r) const {
    if (family == "euclidean") return make_euclidean_metric(dim);
    if (family == "constant") {
        if (!matrix.empty()) {
            Eigen::MatrixXd g(dim, dim);
            if (int(matrix.size()) != dim)
                throw std::invalid_argument("metric: matrix rows do not match dim");
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) g(i, j) = matrix[size_t(i)].at(size_t(j));
            return make_constant_metric(g);
        }
        return make_constant_metric(scale * Eigen::MatrixXd::Identity(dim, dim));
    }
    if (family == "conformal_bump") return make_conformal_bump_metric(dim, amplitude, width * r);
    if (family == "diag_sin") {
        double freq = scale_frequency_with_r ? frequency / r : frequency;
        return make_diag_sin_metric(dim, amplitude, freq, phase);
    }
    throw std::invalid_argument("metric: unknown family '" + family + "'");
}

RegionSpec RegionConfig::build(int dim) const {
    if (variant == "half_space") {
        Eigen::VectorXd nu(dim);
        if (int(normal.size()) < dim) throw std::invalid_argument("region: normal too short");
        for (int i = 0; i < dim; ++i) nu[i] = normal[size_t(i)];
        return make_half_space(nu, offset);
    }
    if (variant == "ball") {
        Eigen::VectorXd c(dim);
        if (int(center.size()) < dim) throw std::invalid_argument("region: center too short");
        for (int i = 0; i < dim; ++i) c[i] = center[size_t(i)];
        return make_ball_region(c, radius, inside);
    }
    if (variant == "subgraph") {
        if (dim != 2) throw std::invalid_argument("region: subgraph requires dim 2");
        GraphFn g = GraphFn::from_callable(profile.callable(), window_lo, window_hi, samples,
                                           profile.bound_on(1e6));
        return make_subgraph_region(std::move(g));
    }
    throw std::invalid_argument("region: unknown variant '" + variant + "'");
}

namespace {

ProfileConfig parse_profile(const ordered_json& j) {
    ProfileConfig p;
    p.family = j.value("family", p.family);
    p.amplitude = j.value("amplitude", p.amplitude);
    p.frequency = j.value("frequency", p.frequency);
    p.phase = j.value("phase", p.phase);
    p.slope = j.value("slope", p.slope);
    p.intercept = j.value("intercept", p.intercept);
    p.exponent = j.value("exponent", p.exponent);
    return p;
}

void check_field(bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw std::invalid_argument("config: field '" + field + "' " + why);
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const ordered_json& j) {
    ExperimentConfig c;
    check_field(j.contains("experiment"), "experiment", "is required");
    c.experiment = j.at("experiment").get<std::string>();
    static const char* kinds[] = {"kernel_check",   "heat_check",        "estimate_sweep",
                                  "nmc_eval",       "perimeter_eval",    "flatness_pipeline",
                                  "solve_and_verify"};
    bool known = false;
    for (const char* k : kinds) known = known || c.experiment == k;
    check_field(known, "experiment", "must name a known experiment kind");

    c.seed = j.value("seed", std::uint64_t(1));
    c.dim = j.value("dim", 1);
    check_field(c.dim == 1 || c.dim == 2, "dim", "must be 1 or 2");
    c.s = j.value("s", 0.5);
    check_field(c.s > 0.0 && c.s < 1.0, "s", "must be in (0,1)");
    c.alpha = j.value("alpha", 0.5 * c.s);
    check_field(c.alpha > 0.0 && c.alpha < c.s, "alpha", "must be in (0,s)");
    c.out = j.value("out", c.out);
    c.calibration_path = j.value("calibration", std::string());

    if (j.contains("metric")) {
        const auto& m = j["metric"];
        c.metric.family = m.value("family", c.metric.family);
        c.metric.scale = m.value("scale", c.metric.scale);
        c.metric.amplitude = m.value("amplitude", c.metric.amplitude);
        c.metric.frequency = m.value("frequency", c.metric.frequency);
        c.metric.phase = m.value("phase", c.metric.phase);
        c.metric.width = m.value("width", c.metric.width);
        c.metric.scale_frequency_with_r = m.value("scale_frequency_with_r",
                                                  c.metric.scale_frequency_with_r);
        if (m.contains("matrix"))
            c.metric.matrix = m["matrix"].get<std::vector<std::vector<double>>>();
    }
    if (j.contains("region")) {
        const auto& r = j["region"];
        c.region.variant = r.value("variant", c.region.variant);
        if (r.contains("normal")) c.region.normal = r["normal"].get<std::vector<double>>();
        c.region.offset = r.value("offset", c.region.offset);
        if (r.contains("center")) c.region.center = r["center"].get<std::vector<double>>();
        c.region.radius = r.value("radius", c.region.radius);
        c.region.inside = r.value("inside", c.region.inside);
        c.region.window_lo = r.value("window_lo", c.region.window_lo);
        c.region.window_hi = r.value("window_hi", c.region.window_hi);
        c.region.samples = r.value("samples", c.region.samples);
        if (r.contains("profile")) c.region.profile = parse_profile(r["profile"]);
    }
    c.estimate = j.value("estimate", c.estimate);
    if (j.contains("radii")) c.radii = j["radii"].get<std::vector<double>>();
    for (double r : c.radii) check_field(r > 0.0, "radii", "must be positive");
    c.pairs = j.value("pairs", c.pairs);
    c.time = j.value("time", c.time);
    if (j.contains("grid_levels")) c.grid_levels = j["grid_levels"].get<std::vector<int>>();
    if (j.contains("points")) c.points = j["points"].get<std::vector<std::vector<double>>>();
    c.omega_radius = j.value("omega_radius", c.omega_radius);
    c.k_max = j.value("k_max", c.k_max);
    c.cloud_samples = j.value("cloud_samples", c.cloud_samples);
    if (j.contains("exterior")) c.exterior = parse_profile(j["exterior"]);
    c.solver_tol = j.value("solver_tol", c.solver_tol);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.viscosity_C0 = j.value("viscosity_C0", c.viscosity_C0);

    c.resolved = j;
    c.resolved["experiment"] = c.experiment;
    c.resolved["seed"] = c.seed;
    c.resolved["dim"] = c.dim;
    c.resolved["s"] = c.s;
    c.resolved["alpha"] = c.alpha;
    return c;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    ordered_json j = ordered_json::parse(in);
    return parse(j);
}

std::string config_hash(const ordered_json& resolved) {
    std::string text = resolved.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace nmsurf
