#include "nmsurf/core/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nmsurf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

// ---------------------------------------------------------------------------
// GraphFn

double GraphFn::eval(double x) const {
    if (values.size() < 2) throw std::invalid_argument("GraphFn: need at least two samples");
    if (x < lo || x > hi) {
        if (!exterior) throw std::invalid_argument("GraphFn: no exterior data");
        return exterior(x);
    }
    double h = spacing();
    double t = (x - lo) / h;
    int i = std::min(int(values.size()) - 2, std::max(0, int(std::floor(t))));
    double u = t - i;
    // Catmull-Rom with one-sided stencils at the window ends; the closed-form
    // exterior supplies the ghost values when present.
    auto at = [&](int j) -> double {
        if (j >= 0 && j < int(values.size())) return values[size_t(j)];
        double xj = lo + j * h;
        if (exterior) return exterior(xj);
        return values[size_t(std::clamp(j, 0, int(values.size()) - 1))];
    };
    double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    double u2 = u * u, u3 = u2 * u;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3);
}

GraphFn GraphFn::from_callable(const std::function<double(double)>& f, double lo, double hi,
                               int samples, double exterior_bound) {
    GraphFn g;
    g.lo = lo;
    g.hi = hi;
    g.values.resize(size_t(samples));
    for (int i = 0; i < samples; ++i)
        g.values[size_t(i)] = f(lo + (hi - lo) * i / double(samples - 1));
    g.exterior = f;
    g.exterior_bound = exterior_bound;
    return g;
}

// ---------------------------------------------------------------------------
// AngularSet

AngularSet AngularSet::full() { return AngularSet{{{0.0, kTwoPi}}}; }
AngularSet AngularSet::empty() { return AngularSet{}; }

double AngularSet::measure() const {
    double m = 0.0;
    for (auto& [a, b] : intervals) m += b - a;
    return m;
}

AngularSet AngularSet::arc(double lo, double hi) {
    if (hi <= lo) return empty();
    if (hi - lo >= kTwoPi) return full();
    double a = std::fmod(lo, kTwoPi);
    if (a < 0) a += kTwoPi;
    double b = a + (hi - lo);
    AngularSet s;
    if (b <= kTwoPi) {
        s.intervals.push_back({a, b});
    } else {
        s.intervals.push_back({0.0, b - kTwoPi});
        s.intervals.push_back({a, kTwoPi});
    }
    std::sort(s.intervals.begin(), s.intervals.end());
    return s;
}

AngularSet AngularSet::complement() const {
    AngularSet out;
    double cursor = 0.0;
    for (auto& [a, b] : intervals) {
        if (a > cursor) out.intervals.push_back({cursor, a});
        cursor = std::max(cursor, b);
    }
    if (cursor < kTwoPi) out.intervals.push_back({cursor, kTwoPi});
    return out;
}

AngularSet AngularSet::unite(const AngularSet& other) const {
    std::vector<std::pair<double, double>> all = intervals;
    all.insert(all.end(), other.intervals.begin(), other.intervals.end());
    std::sort(all.begin(), all.end());
    AngularSet out;
    for (auto& iv : all) {
        if (!out.intervals.empty() && iv.first <= out.intervals.back().second + 1e-15)
            out.intervals.back().second = std::max(out.intervals.back().second, iv.second);
        else
            out.intervals.push_back(iv);
    }
    return out;
}

AngularSet AngularSet::intersect(const AngularSet& other) const {
    return complement().unite(other.complement()).complement();
}

// ---------------------------------------------------------------------------
// Region variants

RegionSpec make_half_space(const Eigen::VectorXd& normal, double offset) {
    double nn = normal.norm();
    if (nn <= 0.0) throw std::invalid_argument("half space: zero normal");
    RegionSpec r;
    r.dim = int(normal.size());
    r.variant = HalfSpaceRegion{normal / nn, offset / nn};
    return r;
}

RegionSpec make_ball_region(const Eigen::VectorXd& center, double radius, bool inside) {
    if (radius <= 0.0) throw std::invalid_argument("ball region: radius must be positive");
    RegionSpec r;
    r.dim = int(center.size());
    r.variant = BallRegion{center, radius, inside};
    return r;
}

RegionSpec make_subgraph_region(GraphFn graph) {
    RegionSpec r;
    r.dim = 2;
    r.variant = SubgraphRegion{std::move(graph)};
    return r;
}

RegionSpec make_boolean_region(BooleanRegion::Op op, std::vector<RegionSpec> children) {
    if (children.empty()) throw std::invalid_argument("boolean region: no children");
    if (op == BooleanRegion::Op::Complement && children.size() != 1)
        throw std::invalid_argument("boolean region: complement takes one child");
    if (op == BooleanRegion::Op::Difference && children.size() != 2)
        throw std::invalid_argument("boolean region: difference takes two children");
    RegionSpec r;
    r.dim = children.front().dim;
    BooleanRegion b;
    b.op = op;
    for (auto& c : children) {
        if (c.dim != r.dim) throw std::invalid_argument("boolean region: mixed dimensions");
        b.children.push_back(std::make_shared<RegionSpec>(std::move(c)));
    }
    r.variant = std::move(b);
    return r;
}

RegionSpec RegionSpec::complemented() const {
    return make_boolean_region(BooleanRegion::Op::Complement, {*this});
}

double RegionSpec::signed_at(const Eigen::VectorXd& x) const {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HalfSpaceRegion>) {
                return x.dot(v.normal) < v.offset ? 1.0 : -1.0;
            } else if constexpr (std::is_same_v<T, BallRegion>) {
                bool in = (x - v.center).norm() < v.radius;
                return (in == v.inside) ? 1.0 : -1.0;
            } else if constexpr (std::is_same_v<T, SubgraphRegion>) {
                return x[x.size() - 1] < v.graph.eval(x[0]) ? 1.0 : -1.0;
            } else {
                const BooleanRegion& b = v;
                switch (b.op) {
                    case BooleanRegion::Op::Complement:
                        return -b.children[0]->signed_at(x);
                    case BooleanRegion::Op::Union: {
                        for (auto& c : b.children)
                            if (c->signed_at(x) > 0) return 1.0;
                        return -1.0;
                    }
                    case BooleanRegion::Op::Intersection: {
                        for (auto& c : b.children)
                            if (c->signed_at(x) < 0) return -1.0;
                        return 1.0;
                    }
                    case BooleanRegion::Op::Difference:
                        return (b.children[0]->signed_at(x) > 0 && b.children[1]->signed_at(x) < 0)
                                   ? 1.0
                                   : -1.0;
                }
                return -1.0;
            }
        },
        variant);
}

namespace {

AngularSet subgraph_circle(const SubgraphRegion& sg, const Eigen::VectorXd& y, double rho) {
    // sigma = +1 where q(phi) < 0, q = y2 + rho sin(phi) - f(y1 + rho cos(phi)).
    auto q = [&](double phi) {
        return y[1] + rho * std::sin(phi) - sg.graph.eval(y[0] + rho * std::cos(phi));
    };
    const int m = 1024;
    std::vector<double> roots;
    double prev = q(0.0);
    bool prev_neg = prev < 0.0;
    bool first_neg = prev_neg;
    for (int i = 1; i <= m; ++i) {
        double phi = kTwoPi * i / m;
        double cur = q(phi);
        bool neg = cur < 0.0;
        if (neg != prev_neg) {
            double a = kTwoPi * (i - 1) / m, b = phi;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (a + b);
                if ((q(mid) < 0.0) == prev_neg)
                    a = mid;
                else
                    b = mid;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_neg = neg;
    }
    if (roots.empty()) return first_neg ? AngularSet::full() : AngularSet::empty();
    AngularSet s;
    // Between consecutive roots the sign is constant; stitch the +1 stretches.
    std::vector<double> bounds = roots;
    bounds.push_back(roots.front() + kTwoPi);
    bool neg = !first_neg; // sign right after the first root
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
        if (neg) s = s.unite(AngularSet::arc(bounds[i], bounds[i + 1]));
        neg = !neg;
    }
    // Stretch from 0 to the first root carries the sign at phi = 0.
    if (first_neg) s = s.unite(AngularSet::arc(0.0, roots.front()));
    if (prev_neg != first_neg) throw std::logic_error("subgraph_circle: inconsistent sign scan");
    return s;
}

} // namespace

AngularSet RegionSpec::circle_inside(const Eigen::VectorXd& y, double rho) const {
    if (dim != 2) throw std::invalid_argument("circle_inside: requires dim == 2");
    if (rho <= 0.0) throw std::invalid_argument("circle_inside: rho must be positive");
    return std::visit(
        [&](const auto& v) -> AngularSet {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HalfSpaceRegion>) {
                double delta = v.offset - y.dot(v.normal);
                double q = delta / rho;
                if (q >= 1.0) return AngularSet::full();
                if (q <= -1.0) return AngularSet::empty();
                double psi = std::atan2(v.normal[1], v.normal[0]);
                double a = std::acos(q);
                return AngularSet::arc(psi + a, psi + kTwoPi - a);
            } else if constexpr (std::is_same_v<T, BallRegion>) {
                Eigen::VectorXd u = v.center - y;
                double d = u.norm();
                AngularSet in_ball;
                if (d < 1e-300) {
                    in_ball = rho < v.radius ? AngularSet::full() : AngularSet::empty();
                } else {
                    double q = (rho * rho + d * d - v.radius * v.radius) / (2.0 * rho * d);
                    if (q <= -1.0)
                        in_ball = AngularSet::full();
                    else if (q >= 1.0)
                        in_ball = AngularSet::empty();
                    else {
                        double psi = std::atan2(u[1], u[0]);
                        double a = std::acos(q);
                        in_ball = AngularSet::arc(psi - a, psi + a);
                    }
                }
                return v.inside ? in_ball : in_ball.complement();
            } else if constexpr (std::is_same_v<T, SubgraphRegion>) {
                return subgraph_circle(v, y, rho);
            } else {
                const BooleanRegion& b = v;
                switch (b.op) {
                    case BooleanRegion::Op::Complement:
                        return b.children[0]->circle_inside(y, rho).complement();
                    case BooleanRegion::Op::Union: {
                        AngularSet s = AngularSet::empty();
                        for (auto& c : b.children) s = s.unite(c->circle_inside(y, rho));
                        return s;
                    }
                    case BooleanRegion::Op::Intersection: {
                        AngularSet s = AngularSet::full();
                        for (auto& c : b.children) s = s.intersect(c->circle_inside(y, rho));
                        return s;
                    }
                    case BooleanRegion::Op::Difference:
                        return b.children[0]->circle_inside(y, rho).intersect(
                            b.children[1]->circle_inside(y, rho).complement());
                }
                return AngularSet::empty();
            }
        },
        variant);
}

int RegionSpec::pair_sum(double y, double rho) const {
    Eigen::VectorXd p(1), q(1);
    p[0] = y + rho;
    q[0] = y - rho;
    return int(signed_at(p) + signed_at(q));
}

std::vector<double> RegionSpec::jump_radii(double y) const {
    if (dim != 1) throw std::invalid_argument("jump_radii: requires dim == 1");
    std::vector<double> out;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, HalfSpaceRegion>) {
                out.push_back(std::abs(v.offset / v.normal[0] - y));
            } else if constexpr (std::is_same_v<T, BallRegion>) {
                double d = std::abs(v.center[0] - y);
                out.push_back(std::abs(d - v.radius));
                out.push_back(d + v.radius);
            } else if constexpr (std::is_same_v<T, BooleanRegion>) {
                for (auto& c : v.children) {
                    auto r = c->jump_radii(y);
                    out.insert(out.end(), r.begin(), r.end());
                }
            } else {
                throw std::invalid_argument("jump_radii: unsupported variant in dim 1");
            }
        },
        variant);
    std::sort(out.begin(), out.end());
    return out;
}

FarField RegionSpec::far_field(const Eigen::VectorXd& y) const {
    return std::visit(
        [&](const auto& v) -> FarField {
            using T = std::decay_t<decltype(v)>;
            FarField f;
            if constexpr (std::is_same_v<T, HalfSpaceRegion>) {
                double delta = std::abs(v.offset - y.dot(v.normal));
                if (dim == 1) {
                    // beyond |delta| the two antipodal samples cancel exactly
                    f.radius = delta * (1.0 + 1e-12) + 1e-300;
                    f.sigma_const = 0.0;
                } else {
                    f.radius = std::max(delta, 1e-12);
                    f.decay_coeff = kTwoPi * delta + 1e-300;
                }
            } else if constexpr (std::is_same_v<T, BallRegion>) {
                f.radius = (v.center - y).norm() + v.radius;
                f.sigma_const = v.inside ? -1.0 : 1.0;
            } else if constexpr (std::is_same_v<T, SubgraphRegion>) {
                double win = 0.0;
                for (double val : v.graph.values) win = std::max(win, std::abs(val - y[1]));
                double df = std::max(win, v.graph.exterior_bound + std::abs(y[1]));
                f.radius = std::max(1.0, 2.0 * df);
                f.decay_coeff = 2.0 * kTwoPi * df + 1e-300;
            } else {
                const BooleanRegion& b = v;
                if (b.op == BooleanRegion::Op::Complement) {
                    f = b.children[0]->far_field(y);
                    if (f.sigma_const) f.sigma_const = -*f.sigma_const;
                    return f;
                }
                bool all_const = true;
                double radius = 0.0;
                for (auto& c : b.children) {
                    FarField cf = c->far_field(y);
                    radius = std::max(radius, cf.radius);
                    if (!cf.sigma_const) all_const = false;
                }
                f.radius = radius;
                if (all_const && dim == 1) {
                    // every child is eventually constant per side; probe once
                    double rr = radius * (1.0 + 1e-9) + 1e-9;
                    f.sigma_const = 0.5 * pair_sum(y[0], rr);
                } else if (all_const) {
                    std::optional<double> combined;
                    bool consistent = true;
                    // combine child constants through the boolean op
                    auto val = [&](std::size_t i) { return *b.children[i]->far_field(y).sigma_const; };
                    switch (b.op) {
                        case BooleanRegion::Op::Union: {
                            double s = -1.0;
                            for (std::size_t i = 0; i < b.children.size(); ++i)
                                if (val(i) > 0) s = 1.0;
                            combined = s;
                            break;
                        }
                        case BooleanRegion::Op::Intersection: {
                            double s = 1.0;
                            for (std::size_t i = 0; i < b.children.size(); ++i)
                                if (val(i) < 0) s = -1.0;
                            combined = s;
                            break;
                        }
                        case BooleanRegion::Op::Difference:
                            combined = (val(0) > 0 && val(1) < 0) ? 1.0 : -1.0;
                            break;
                        default:
                            consistent = false;
                    }
                    if (consistent) f.sigma_const = combined;
                    else f.decay_coeff = std::numeric_limits<double>::infinity();
                } else {
                    // mixed far fields: no certified decay, integrate far and flag
                    f.decay_coeff = std::numeric_limits<double>::infinity();
                }
            }
            return f;
        },
        variant);
}

} // namespace nmsurf
