#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nmsurf/core/metric.hpp"

namespace nmsurf {

/// Discretization plan for the variable-coefficient heat solves.
/// theta = 0.5 is trapezoidal, theta = 1 implicit Euler; the first
/// `rannacher_steps` steps are always taken fully implicit to damp the
/// discrete-delta startup.
struct SolvePlan {
    double h = 1.0 / 128.0;
    double tau = 1e-3;
    double theta = 0.5;
    double padding = 4.0;
    int rannacher_steps = 2;
    int substeps = 8;                // steps per requested output segment
    double mass_tolerance = 1e-10;

    void validate() const;
};

/// Interior nodes of a Dirichlet box, optionally restricted to a ball.
/// Nodes outside the active set carry homogeneous Dirichlet values.
class HeatGrid {
public:
    static HeatGrid box(int dim, const Eigen::VectorXd& center, double half_extent, double h);
    static HeatGrid ball(int dim, const Eigen::VectorXd& center, double half_extent, double h,
                         const Eigen::VectorXd& ball_center, double ball_radius);

    int dim() const { return dim_; }
    double h() const { return h_; }
    double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
    int num_active() const { return int(active_nodes_.size()); }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    /// equation index of the lattice node, or -1 if Dirichlet.
    int equation(int ix, int iy) const;
    Eigen::VectorXd coords_of_node(int node) const;   // lattice node id = ix + nx*iy
    Eigen::VectorXd coords_of_equation(int eq) const;
    int node_of_equation(int eq) const { return active_nodes_[size_t(eq)]; }
    /// nearest active node to a point; rejects points outside the box.
    int nearest_equation(const Eigen::VectorXd& p) const;

private:
    int dim_ = 1;
    Eigen::VectorXd lo_;
    double h_ = 0.0;
    int nx_ = 0, ny_ = 1;
    std::vector<int> eq_of_node_;
    std::vector<int> active_nodes_;
};

/// Grid function H(t, x0, .) produced by a solve, with the bookkeeping the
/// exporters and certification checks need.
struct HeatField {
    HeatGrid grid;
    Eigen::VectorXd values; // one entry per active equation
    double t = 0.0;
    Eigen::VectorXd source;
    std::string boundary = "dirichlet";
    double mass = 0.0;
    double min_value = 0.0;

    double value_near(const Eigen::VectorXd& p) const;
};

/// theta-scheme propagator for du/dt = |g|^{-1/2} div(|g|^{1/2} g^{-1} grad u)
/// on a HeatGrid with zero Dirichlet data. The spatial operator is the
/// symmetric conservative discretization; the scheme is self-adjoint with
/// respect to the lumped volume weights, which is what makes the discrete
/// kernel symmetric in (source, target).
class HeatPropagator {
public:
    HeatPropagator(const MetricField& metric, const HeatGrid& grid, double theta);

    /// unit-mass discrete delta at the active node nearest to x0.
    Eigen::VectorXd delta(const Eigen::VectorXd& x0, int* snapped_eq = nullptr) const;

    /// advance one step of size tau; src_now/src_next are optional volume-free
    /// source terms F(t_k), F(t_{k+1}) added theta-weighted.
    void step(Eigen::VectorXd& u, double tau, double theta_override = -1.0,
              const Eigen::VectorXd* src_now = nullptr,
              const Eigen::VectorXd* src_next = nullptr);

    double mass(const Eigen::VectorXd& u) const;
    const HeatGrid& grid() const { return grid_; }
    const Eigen::VectorXd& volume_weights() const { return dvol_; }
    const Eigen::SparseMatrix<double>& stiffness() const { return stiff_; }

private:
    const Eigen::SparseMatrix<double>& lhs_factorized(double tau, double theta);

    HeatGrid grid_;
    double theta_ = 0.5;
    Eigen::SparseMatrix<double> stiff_;  // S, symmetric, positive semidefinite
    Eigen::VectorXd dvol_;               // sqrt(det g) at nodes
    Eigen::SparseMatrix<double> lhs_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
    double cached_tau_ = -1.0, cached_theta_ = -1.0;
};

/// Step schedule for a delta start: implicit-Euler steps at the resolution
/// time scale h^2 (they damp the lattice delta's high frequencies), then a
/// geometric trapezoidal ramp whose per-octave density follows
/// plan.substeps. Both marching routes share this schedule so they remain
/// comparable run to run.
struct RampStep {
    double tau;
    double theta;
};
std::vector<RampStep> ramp_schedule(double t1, const SolvePlan& plan);

/// March a delta source from t = 0, reporting the state at each requested
/// time. Times must be strictly increasing and positive. The first segment
/// is subdivided geometrically and started with implicit-Euler steps.
void march_heat(HeatPropagator& prop, const Eigen::VectorXd& x0, const SolvePlan& plan,
                const std::vector<double>& times,
                const std::function<void(double, const Eigen::VectorXd&)>& on_time);

/// Whole-space kernel approximation on a padded Dirichlet box.
HeatField solve_heat(const MetricField& metric, const SolvePlan& plan, double t,
                     const Eigen::VectorXd& x0,
                     std::optional<Eigen::VectorXd> box_center = std::nullopt,
                     std::optional<double> box_half = std::nullopt);

struct DirichletGapSample {
    double t = 0.0;
    double gap = 0.0;
};

/// sup over probe sources x in V_r(p) of  ∫_{V_rho(p)} (H - H_{V_r(p)}) dV,
/// evaluated at each requested time in one marching pass per source.
std::vector<DirichletGapSample> dirichlet_mass_gap(const MetricField& metric,
                                                   const Eigen::VectorXd& p, double r, double rho,
                                                   const SolvePlan& plan,
                                                   const std::vector<double>& times,
                                                   int probe_sources = 3);

/// Convenience wrapper: the gap at a single time.
double solve_heat_dirichlet_gap(const MetricField& metric, const Eigen::VectorXd& p, double r,
                                double rho, const SolvePlan& plan, double t);

} // namespace nmsurf
