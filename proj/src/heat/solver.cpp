#include "nmsurf/heat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nmsurf/heat/closed_form.hpp"

namespace nmsurf {

void SolvePlan::validate() const {
    if (!(h > 0.0) || !(tau > 0.0)) throw std::invalid_argument("SolvePlan: h and tau must be positive");
    if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("SolvePlan: theta must be in [0.5, 1]");
    if (padding <= 0.0) throw std::invalid_argument("SolvePlan: padding must be positive");
}

// ---------------------------------------------------------------------------
// HeatGrid

HeatGrid HeatGrid::box(int dim, const Eigen::VectorXd& center, double half_extent, double h) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("HeatGrid: dim must be 1 or 2");
    if (half_extent <= 0.0 || h <= 0.0) throw std::invalid_argument("HeatGrid: bad extent or h");
    HeatGrid g;
    g.dim_ = dim;
    int cells = std::max(4, int(std::ceil(2.0 * half_extent / h)));
    g.h_ = 2.0 * half_extent / cells;
    g.nx_ = cells - 1;
    g.ny_ = (dim == 2) ? cells - 1 : 1;
    g.lo_ = center.array() - half_extent;
    int total = g.nx_ * g.ny_;
    g.eq_of_node_.resize(size_t(total));
    g.active_nodes_.reserve(size_t(total));
    for (int node = 0; node < total; ++node) {
        g.eq_of_node_[size_t(node)] = int(g.active_nodes_.size());
        g.active_nodes_.push_back(node);
    }
    return g;
}

HeatGrid HeatGrid::ball(int dim, const Eigen::VectorXd& center, double half_extent, double h,
                        const Eigen::VectorXd& ball_center, double ball_radius) {
    HeatGrid g = box(dim, center, half_extent, h);
    g.active_nodes_.clear();
    int total = g.nx_ * g.ny_;
    for (int node = 0; node < total; ++node) {
        Eigen::VectorXd p = g.coords_of_node(node);
        if ((p - ball_center).norm() < ball_radius) {
            g.eq_of_node_[size_t(node)] = int(g.active_nodes_.size());
            g.active_nodes_.push_back(node);
        } else {
            g.eq_of_node_[size_t(node)] = -1;
        }
    }
    if (g.active_nodes_.empty()) throw std::invalid_argument("HeatGrid::ball: no active nodes");
    return g;
}

int HeatGrid::equation(int ix, int iy) const {
    if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
    return eq_of_node_[size_t(ix + nx_ * iy)];
}

Eigen::VectorXd HeatGrid::coords_of_node(int node) const {
    int ix = node % nx_, iy = node / nx_;
    Eigen::VectorXd p(dim_);
    p[0] = lo_[0] + (ix + 1) * h_;
    if (dim_ == 2) p[1] = lo_[1] + (iy + 1) * h_;
    return p;
}

Eigen::VectorXd HeatGrid::coords_of_equation(int eq) const {
    return coords_of_node(active_nodes_[size_t(eq)]);
}

int HeatGrid::nearest_equation(const Eigen::VectorXd& p) const {
    int ix = int(std::lround((p[0] - lo_[0]) / h_)) - 1;
    int iy = dim_ == 2 ? int(std::lround((p[1] - lo_[1]) / h_)) - 1 : 0;
    ix = std::clamp(ix, 0, nx_ - 1);
    iy = std::clamp(iy, 0, ny_ - 1);
    int eq = equation(ix, iy);
    if (eq >= 0) return eq;
    // masked grid: fall back to a scan
    double best = std::numeric_limits<double>::infinity();
    int best_eq = -1;
    for (int e = 0; e < num_active(); ++e) {
        double d = (coords_of_equation(e) - p).norm();
        if (d < best) { best = d; best_eq = e; }
    }
    if (best_eq < 0) throw std::invalid_argument("HeatGrid: no active node near point");
    return best_eq;
}

double HeatField::value_near(const Eigen::VectorXd& p) const {
    return values[grid.nearest_equation(p)];
}

// ---------------------------------------------------------------------------
// HeatPropagator

HeatPropagator::HeatPropagator(const MetricField& metric, const HeatGrid& grid, double theta)
    : grid_(grid), theta_(theta) {
    const int dim = grid.dim();
    const double h = grid.h();
    const double inv_h2 = 1.0 / (h * h);
    const int m = grid.num_active();

    auto coef = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::MatrixXd g = metric(x);
        return std::sqrt(g.determinant()) * g.inverse();
    };

    dvol_.resize(m);
    for (int e = 0; e < m; ++e)
        dvol_[e] = std::sqrt(metric(grid.coords_of_equation(e)).determinant());

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(size_t(m) * (dim == 1 ? 3 : 9));
    for (int e = 0; e < m; ++e) {
        int node = grid.node_of_equation(e);
        int ix = node % grid.nx(), iy = node / grid.nx();
        Eigen::VectorXd x = grid.coords_of_equation(e);
        double diag = 0.0;
        for (int axis = 0; axis < dim; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2) {
                Eigen::VectorXd mid = x;
                mid[axis] += 0.5 * dir * h;
                double a = coef(mid)(axis, axis);
                diag += a * inv_h2;
                int jx = ix + (axis == 0 ? dir : 0), jy = iy + (axis == 1 ? dir : 0);
                int je = grid.equation(jx, jy);
                if (je >= 0) trips.emplace_back(e, je, -a * inv_h2);
            }
        }
        trips.emplace_back(e, e, diag);
        if (dim == 2) {
            // cross-derivative part of div(a grad), centered and symmetric
            auto a12_at = [&](int jx, int jy) {
                Eigen::VectorXd p(2);
                p[0] = x[0] + (jx - ix) * h;
                p[1] = x[1] + (jy - iy) * h;
                return coef(p)(0, 1);
            };
            const double q = 0.25 * inv_h2;
            struct C { int dx, dy; double w; };
            double ap = a12_at(ix + 1, iy), am = a12_at(ix - 1, iy);
            double bp = a12_at(ix, iy + 1), bm = a12_at(ix, iy - 1);
            C corners[4] = {{+1, +1, -(ap + bp) * q},
                            {+1, -1, +(ap + bm) * q},
                            {-1, +1, +(am + bp) * q},
                            {-1, -1, -(am + bm) * q}};
            for (auto& c : corners) {
                int je = grid.equation(ix + c.dx, iy + c.dy);
                if (je >= 0) trips.emplace_back(e, je, c.w);
            }
        }
    }
    stiff_.resize(m, m);
    stiff_.setFromTriplets(trips.begin(), trips.end());
}

Eigen::VectorXd HeatPropagator::delta(const Eigen::VectorXd& x0, int* snapped_eq) const {
    int eq = grid_.nearest_equation(x0);
    if (snapped_eq) *snapped_eq = eq;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(grid_.num_active());
    u[eq] = 1.0 / (dvol_[eq] * grid_.cell_volume());
    return u;
}

const Eigen::SparseMatrix<double>& HeatPropagator::lhs_factorized(double tau, double theta) {
    if (tau != cached_tau_ || theta != cached_theta_) {
        Eigen::SparseMatrix<double> d(grid_.num_active(), grid_.num_active());
        std::vector<Eigen::Triplet<double>> dt;
        dt.reserve(size_t(grid_.num_active()));
        for (int i = 0; i < grid_.num_active(); ++i) dt.emplace_back(i, i, dvol_[i]);
        d.setFromTriplets(dt.begin(), dt.end());
        lhs_ = d + theta * tau * stiff_;
        solver_.compute(lhs_);
        if (solver_.info() != Eigen::Success)
            throw std::runtime_error("HeatPropagator: factorization failed");
        cached_tau_ = tau;
        cached_theta_ = theta;
    }
    return lhs_;
}

void HeatPropagator::step(Eigen::VectorXd& u, double tau, double theta_override,
                          const Eigen::VectorXd* src_now, const Eigen::VectorXd* src_next) {
    double th = theta_override >= 0.0 ? theta_override : theta_;
    lhs_factorized(tau, th);
    Eigen::VectorXd rhs = dvol_.cwiseProduct(u) - (1.0 - th) * tau * (stiff_ * u);
    if (src_now && th < 1.0) rhs += (1.0 - th) * tau * dvol_.cwiseProduct(*src_now);
    if (src_next && th > 0.0) rhs += th * tau * dvol_.cwiseProduct(*src_next);
    u = solver_.solve(rhs);
}

double HeatPropagator::mass(const Eigen::VectorXd& u) const {
    return grid_.cell_volume() * dvol_.dot(u);
}

// ---------------------------------------------------------------------------
// Marching

std::vector<RampStep> ramp_schedule(double t1, const SolvePlan& plan) {
    std::vector<RampStep> steps;
    int n_ie = std::max(2, plan.rannacher_steps);
    double tau_start = std::min(0.5 * plan.h * plan.h, t1 / (8.0 * n_ie));
    double tcur = 0.0;
    for (int k = 0; k < n_ie; ++k) {
        steps.push_back({tau_start, 1.0});
        tcur += tau_start;
    }
    double per_octave = std::max(4, plan.substeps);
    double ratio = std::pow(2.0, 1.0 / per_octave);
    int m = std::max(int(per_octave),
                     int(std::ceil(std::log1p((t1 - tcur) * (ratio - 1.0) / tau_start) /
                                   std::log(ratio))) + 1);
    double tau = (t1 - tcur) * (ratio - 1.0) / (std::pow(ratio, m) - 1.0);
    for (int k = 0; k < m; ++k) {
        if (k + 1 == m) tau = t1 - tcur; // absorb roundoff in the last step
        steps.push_back({tau, plan.theta});
        tcur += tau;
        tau *= ratio;
    }
    return steps;
}

void march_heat(HeatPropagator& prop, const Eigen::VectorXd& x0, const SolvePlan& plan,
                const std::vector<double>& times,
                const std::function<void(double, const Eigen::VectorXd&)>& on_time) {
    if (times.empty()) return;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("march_heat: times must be strictly increasing");
    if (times.front() <= 0.0) throw std::invalid_argument("march_heat: times must be positive");

    Eigen::VectorXd u = prop.delta(x0);

    // first segment: shared delta-start ramp
    {
        double t1 = times.front();
        for (const RampStep& st : ramp_schedule(t1, plan)) prop.step(u, st.tau, st.theta);
        on_time(t1, u);
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        double seg = times[i + 1] - times[i];
        int m = plan.substeps;
        double tau = seg / m;
        for (int k = 0; k < m; ++k) prop.step(u, tau);
        on_time(times[i + 1], u);
    }
}

HeatField solve_heat(const MetricField& metric, const SolvePlan& plan, double t,
                     const Eigen::VectorXd& x0, std::optional<Eigen::VectorXd> box_center,
                     std::optional<double> box_half) {
    plan.validate();
    if (t < plan.tau) throw std::invalid_argument("solve_heat: t must be at least tau");
    if (metric.lower() < 0.5 - 1e-12 || metric.upper() > 2.0 + 1e-12 || metric.grad_bound() > 1.0 + 1e-12)
        throw std::invalid_argument("solve_heat: metric fails the admissibility bounds");
    if (plan.theta < 1.0 && plan.rannacher_steps < 2) {
        double tau_max = plan.h * plan.h / (2.0 * metric.upper() * metric.dim());
        if (plan.tau > tau_max) {
            std::ostringstream os;
            os << "solve_heat: resolution check failed for theta < 1 without startup damping; "
               << "use tau <= " << tau_max << " or rannacher_steps >= 2";
            throw std::invalid_argument(os.str());
        }
    }

    Eigen::VectorXd center = box_center.value_or(x0);
    double half = box_half.value_or(plan.padding * std::sqrt(metric.upper() * t) + 4.0 * plan.h);
    HeatGrid grid = HeatGrid::box(metric.dim(), center, half, plan.h);
    HeatPropagator prop(metric, grid, plan.theta);

    HeatField field;
    field.grid = grid;
    field.t = t;
    field.boundary = "dirichlet";
    int eq = grid.nearest_equation(x0);
    field.source = grid.coords_of_equation(eq);
    march_heat(prop, x0, plan, {t}, [&](double, const Eigen::VectorXd& u) { field.values = u; });
    field.mass = prop.mass(field.values);
    field.min_value = field.values.minCoeff();
    if (field.mass > 1.0 + plan.mass_tolerance)
        throw std::runtime_error("solve_heat: mass exceeded 1 beyond tolerance");
    return field;
}

// ---------------------------------------------------------------------------
// Dirichlet gap

std::vector<DirichletGapSample> dirichlet_mass_gap(const MetricField& metric,
                                                   const Eigen::VectorXd& p, double r, double rho,
                                                   const SolvePlan& plan,
                                                   const std::vector<double>& times,
                                                   int probe_sources) {
    plan.validate();
    if (!(rho < r)) throw std::invalid_argument("dirichlet gap: need rho < r");
    if (times.empty()) throw std::invalid_argument("dirichlet gap: no times");
    double t_max = times.back();
    double half = r + plan.padding * std::sqrt(metric.upper() * t_max) + 4.0 * plan.h;

    HeatGrid full = HeatGrid::box(metric.dim(), p, half, plan.h);
    HeatGrid ball = HeatGrid::ball(metric.dim(), p, half, plan.h, p, r);
    HeatPropagator prop_full(metric, full, plan.theta);
    HeatPropagator prop_ball(metric, ball, plan.theta);

    // lattice nodes inside the inner ball V_rho(p), shared by both grids
    std::vector<int> inner_nodes;
    for (int e = 0; e < full.num_active(); ++e) {
        if ((full.coords_of_equation(e) - p).norm() < rho)
            inner_nodes.push_back(full.node_of_equation(e));
    }

    std::vector<DirichletGapSample> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = {times[i], 0.0};

    for (int k = 0; k < probe_sources; ++k) {
        double off = probe_sources == 1 ? 0.0 : 0.8 * r * k / double(probe_sources - 1) - 0.0;
        Eigen::VectorXd x = p;
        x[0] += off * 0.75; // probes along the first axis, staying inside V_r
        std::vector<Eigen::VectorXd> snap_full(times.size()), snap_ball(times.size());
        std::size_t idx = 0;
        march_heat(prop_full, x, plan, times, [&](double, const Eigen::VectorXd& u) {
            snap_full[idx++] = u;
        });
        idx = 0;
        march_heat(prop_ball, x, plan, times, [&](double, const Eigen::VectorXd& u) {
            snap_ball[idx++] = u;
        });
        for (std::size_t i = 0; i < times.size(); ++i) {
            double acc = 0.0;
            for (int node : inner_nodes) {
                int ef = full.equation(node % full.nx(), node / full.nx());
                int eb = ball.equation(node % ball.nx(), node / ball.nx());
                double uf = snap_full[i][ef];
                double ub = eb >= 0 ? snap_ball[i][eb] : 0.0;
                double w = std::sqrt(metric(full.coords_of_equation(ef)).determinant());
                acc += (uf - ub) * w;
            }
            acc *= full.cell_volume();
            out[i].gap = std::max(out[i].gap, acc);
        }
    }
    return out;
}

double solve_heat_dirichlet_gap(const MetricField& metric, const Eigen::VectorXd& p, double r,
                                double rho, const SolvePlan& plan, double t) {
    if (!(t <= r * r + 1e-12)) throw std::invalid_argument("dirichlet gap: require t <= r^2");
    auto samples = dirichlet_mass_gap(metric, p, r, rho, plan, {t});
    return samples.front().gap;
}

} // namespace nmsurf
