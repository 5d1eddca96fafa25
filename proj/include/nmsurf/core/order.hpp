#pragma once

#include <stdexcept>

namespace nmsurf {

/// Fractional order s of the kernel together with the flatness exponent
/// alpha used by the dyadic cylinder analysis. Requires 0 < alpha < s < 1.
struct FractionalOrder {
    double s;
    double alpha;

    FractionalOrder(double s_, double alpha_) : s(s_), alpha(alpha_) {
        if (!(s > 0.0 && s < 1.0))
            throw std::invalid_argument("FractionalOrder: s must be in (0,1)");
        if (!(alpha > 0.0 && alpha < s))
            throw std::invalid_argument("FractionalOrder: alpha must be in (0,s)");
    }
};

} // namespace nmsurf
