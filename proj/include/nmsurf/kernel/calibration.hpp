#pragma once

#include <string>

namespace nmsurf {

/// Frozen constants for the estimate certifiers and the dichotomy check.
/// The paper-level statements assert existence of these constants; the
/// artifact fits them once per (n, s, family) sweep and keeps them stable
/// across runs in a versioned file.
struct Calibration {
    int calibration_version = 1;
    int n = 1;
    double s = 0.5;
    std::string family = "euclidean";

    double C_effacement = 0.0; // kernel freezing L1 gap <= C r^{-s}
    double C_measure = 0.0;    // volume asymmetry mass <= C r^{-s}
    double C_tail = 0.0;       // tail integral constant (omega * cns / s)
    double C_dirichlet = 0.0;  // Dirichlet kernel gap <= C r^{-s}
    double delta_harnack = 0.1;
    int k0 = 4;

    double effacement_slope = 0.0;
    double measure_slope = 0.0;
    double dirichlet_slope = 0.0;
    double gauss_C = 0.0;
    double gauss_c = 0.0;

    std::string to_json() const;
    static Calibration from_json(const std::string& text);
    void save(const std::string& path, bool overwrite = false) const;
    static Calibration load(const std::string& path);
};

} // namespace nmsurf
