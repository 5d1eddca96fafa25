#pragma once

#include "nmsurf/core/region.hpp"

namespace nmsurf {

struct GraphFracLapOptions {
    double inner_cutoff = 1e-7; // paired integrand is O(z^{1-s}); this slice is budget
    int segments_per_octave = 2;
    int gl_nodes = 12;
};

/// Growth certificate |f(x)| <= C (1 + |x|^{1+alpha}) at every sample of the
/// window grid.
bool growth_check(const GraphFn& f, double alpha, double C);

struct GraphFracLap {
    double value = 0.0;       // window part of the PV integral
    double tail_bound = 0.0;  // growth-bound estimate of the remainder
    bool converged = true;
};

/// PV integral of (f(x+z) - f(x)) |z|^{-(m + order*2)} over the grid window
/// (m = 1 here), with antipodal pairing near zero. `order` is the half-power
/// of the operator: the regularity pipeline uses (1+s)/2, so the kernel
/// exponent is 2 + s. The part of the integral beyond the window is bounded
/// through the growth condition and reported, not added.
GraphFracLap frac_laplacian_graph(const GraphFn& f, double order, double x,
                                  double growth_alpha = 0.0, double growth_C = 0.0,
                                  const GraphFracLapOptions& opts = {});

} // namespace nmsurf
