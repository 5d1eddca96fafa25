#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace nmsurf {

/// Outcome of the dichotomy test at scale k: a flat boundary must leave
/// either the top or the bottom delta^2-fraction of its trapping cylinder.
/// `Neither` on a certified bounded-NMC set falsifies the calibrated delta
/// and carries a witness point.
struct DichotomyOutcome {
    enum class Branch { Upper, Lower, Neither };
    Branch branch = Branch::Neither;
    double delta = 0.0;
    bool both_hold = false;
    std::optional<Eigen::VectorXd> witness;
};

/// Checks the two inclusions on the sample: with a = r 2^{-k(1+alpha)},
/// upper means max x^n <= a (1 - delta^2) over the ball of radius
/// r 2^{-k} delta, lower means min x^n >= -a (1 - delta^2).
/// Precondition: the hypothesis cylinders at levels 0..k contain the
/// boundary; a violated level is an error naming the scale.
DichotomyOutcome harnack_dichotomy_check(const std::vector<Eigen::VectorXd>& boundary_pts,
                                         double delta, int k, double alpha, double r);

} // namespace nmsurf
