#pragma once

#include <vector>

#include "nmsurf/heat/solver.hpp"

namespace nmsurf {

struct GaussianSample {
    double t = 0.0;
    double dist = 0.0;  // |x - y| (Euclidean)
    double value = 0.0; // H(t, x, y)
};

struct GaussianFit {
    double C = 0.0;
    double c = 0.0;
    bool pass = false;
    double max_log_residual = 0.0; // worst log excess of a sample over the fit
    int samples = 0;
};

/// Least-squares fit of log H = log C - (n/2) log t - c |x-y|^2 / t, then an
/// envelope verdict: pass iff every sample lies below slack * C t^{-n/2}
/// exp(-c d^2/t). Rejects sample sets with a single distinct time.
GaussianFit gaussian_bound_fit(const std::vector<GaussianSample>& samples, int n,
                               double slack = 1.5);

/// Envelope check against externally calibrated constants.
bool gaussian_envelope_holds(const std::vector<GaussianSample>& samples, int n, double C, double c,
                             double slack = 1.0);

/// Collect samples from a heat field at every active node within
/// max_dist of the source (values below floor are skipped).
void collect_gaussian_samples(const HeatField& field, double max_dist, double floor,
                              std::vector<GaussianSample>& out);

} // namespace nmsurf
