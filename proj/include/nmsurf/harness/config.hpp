#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmsurf/core/chart.hpp"
#include "nmsurf/core/metric.hpp"
#include "nmsurf/core/region.hpp"

namespace nmsurf {

/// Closed-form scalar profile families used for exterior data, test graphs
/// and subgraph regions. Field names documented in the README.
struct ProfileConfig {
    std::string family = "zero"; // zero | linear | sin | cos | abs_power | parabola
    double amplitude = 0.0;
    double frequency = 1.0;
    double phase = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double exponent = 1.5;

    std::function<double(double)> callable() const;
    double bound_on(double radius) const; // sup |f| on [-radius, radius]
};

struct MetricConfig {
    std::string family = "euclidean"; // euclidean | constant | conformal_bump | diag_sin
    double scale = 1.0;               // constant: scale * Id (or explicit matrix)
    std::vector<std::vector<double>> matrix;
    double amplitude = 0.4;
    double frequency = 1.0;
    double phase = 0.0;
    double width = 1.0;
    bool scale_frequency_with_r = true; // sweep families stay admissible at every r

    MetricField build(int dim, double r = 1.0) const;
};

struct RegionConfig {
    std::string variant = "half_space"; // half_space | ball | subgraph
    std::vector<double> normal{0.0, 1.0};
    double offset = 0.0;
    std::vector<double> center{0.0, 0.0};
    double radius = 1.0;
    bool inside = true;
    // subgraph
    ProfileConfig profile;
    double window_lo = -1.0, window_hi = 1.0;
    int samples = 257;

    RegionSpec build(int dim) const;
};

struct ExperimentConfig {
    std::string experiment; // kernel_check | heat_check | estimate_sweep | nmc_eval |
                            // perimeter_eval | flatness_pipeline | solve_and_verify
    std::uint64_t seed = 1;
    int dim = 1;
    double s = 0.5;
    double alpha = 0.25;
    std::string out = "out";
    std::string calibration_path;

    MetricConfig metric;
    RegionConfig region;

    // estimate_sweep
    std::string estimate = "effacement"; // effacement | measure | dirichlet | tail
    std::vector<double> radii{1.0, 0.5, 0.25, 0.125};

    // kernel_check
    int pairs = 20;

    // heat_check
    double time = 0.1;
    std::vector<int> grid_levels{64, 128, 256};

    // nmc_eval / perimeter_eval
    std::vector<std::vector<double>> points;
    double omega_radius = 1.0;

    // flatness_pipeline
    int k_max = 5;
    int cloud_samples = 4096;

    // solve_and_verify
    ProfileConfig exterior;
    double solver_tol = 1e-3;
    int max_iters = 4000;
    double viscosity_C0 = 1e-3;

    nlohmann::ordered_json resolved; // full config as parsed + defaults

    static ExperimentConfig parse(const nlohmann::ordered_json& j);
    static ExperimentConfig parse_file(const std::string& path);
};

/// FNV-1a of the resolved config text; embedded in every report.
std::string config_hash(const nlohmann::ordered_json& resolved);

} // namespace nmsurf
