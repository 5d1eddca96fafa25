#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace nmsurf {

/// Grid function on a 1-d window with a closed-form extension outside it.
/// Interpolation is Catmull-Rom (exact on cubics), so quadratic test graphs
/// are reproduced exactly by the quadrature layers built on top.
struct GraphFn {
    double lo = -1.0;
    double hi = 1.0;
    std::vector<double> values;                    // uniform samples on [lo, hi]
    std::function<double(double)> exterior;        // evaluated for x outside [lo, hi]
    double exterior_bound = 0.0;                   // sup |exterior|

    double spacing() const { return (hi - lo) / double(values.size() - 1); }
    double eval(double x) const;
    static GraphFn from_callable(const std::function<double(double)>& f, double lo, double hi,
                                 int samples, double exterior_bound = 0.0);
};

/// Union of disjoint angular intervals in [0, 2pi), used for exact
/// circle/region intersections in the principal-value quadrature.
struct AngularSet {
    std::vector<std::pair<double, double>> intervals; // non-wrapping, sorted, in [0, 2pi]

    double measure() const;
    static AngularSet full();
    static AngularSet empty();
    static AngularSet arc(double lo, double hi); // any real endpoints, wraps mod 2pi
    AngularSet complement() const;
    AngularSet unite(const AngularSet& other) const;
    AngularSet intersect(const AngularSet& other) const;
};

struct HalfSpaceRegion {
    Eigen::VectorXd normal; // unit
    double offset = 0.0;    // E = { x . normal < offset }
};

struct BallRegion {
    Eigen::VectorXd center;
    double radius = 1.0;
    bool inside = true; // E = ball when true, complement otherwise
};

/// E = { x_n < f(x') }, graph direction fixed to the last coordinate.
/// Supported for n = 2 (graphs over a 1-d window).
struct SubgraphRegion {
    GraphFn graph;
};

struct RegionSpec;

struct BooleanRegion {
    enum class Op { Union, Intersection, Difference, Complement };
    Op op;
    std::vector<std::shared_ptr<const RegionSpec>> children;
};

/// Far-field description used by tail integration: beyond `radius` either the
/// signed indicator is constant on every sphere (sigma_const), or the
/// sphere-averaged signed occupation decays like decay_coeff / rho.
struct FarField {
    double radius = 0.0;
    std::optional<double> sigma_const;
    double decay_coeff = 0.0;
};

/// Measurable set given by a closed-form variant. The signed indicator is
/// +1 inside E and -1 outside (chi_E - chi_CE).
struct RegionSpec {
    using Variant = std::variant<HalfSpaceRegion, BallRegion, SubgraphRegion, BooleanRegion>;

    Variant variant;
    int dim = 1;

    double signed_at(const Eigen::VectorXd& x) const;

    /// n = 2: exact angular set {phi : y + rho e(phi) in E}.
    AngularSet circle_inside(const Eigen::VectorXd& y, double rho) const;

    /// n = 1: sigma(y + rho) + sigma(y - rho), in {-2, 0, 2}.
    int pair_sum(double y, double rho) const;

    /// n = 1: sorted radii at which sigma(y +/- rho) can switch, i.e. the
    /// distances from y to the region's boundary points. Between consecutive
    /// radii the paired integrand is constant, so 1-d quadrature is exact.
    std::vector<double> jump_radii(double y) const;

    FarField far_field(const Eigen::VectorXd& y) const;

    RegionSpec complemented() const;
};

RegionSpec make_half_space(const Eigen::VectorXd& normal, double offset);
RegionSpec make_ball_region(const Eigen::VectorXd& center, double radius, bool inside = true);
RegionSpec make_subgraph_region(GraphFn graph);
RegionSpec make_boolean_region(BooleanRegion::Op op, std::vector<RegionSpec> children);

} // namespace nmsurf
