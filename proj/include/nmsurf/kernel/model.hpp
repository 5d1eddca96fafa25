#pragma once

#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "nmsurf/core/metric.hpp"
#include "nmsurf/heat/solver.hpp"
#include "nmsurf/kernel/normalization.hpp"

namespace nmsurf {

/// Dimensionless discretization knobs for the subordinated kernel; every
/// length scales with the local admissibility radius r so that sweep values
/// inherit the exact r^{-s} homogeneity of the estimates.
struct NumericKernelOptions {
    double h_rel = 1.0 / 64.0;  // grid spacing / r
    double box_core = 2.0;      // near box half-extent / r (before diffusion padding)
    double tmax_factor = 64.0;  // T_max / r^2
    int nodes_per_octave = 6;   // time-quadrature density
    int substeps = 6;           // marching steps between quadrature nodes
    double padding = 4.0;
    double theta = 0.5;
};

/// Kernel evaluation model: either the closed-form constant-metric kernel or
/// the heat-subordinated numeric kernel of a variable metric. The
/// `lebesgue_measure` flag selects the frozen-coefficient convention (plain
/// dx) instead of the metric volume when the model feeds the NMC integrals.
struct KernelModel {
    enum class Kind { ConstantMetric, Numeric };

    Kind kind = Kind::ConstantMetric;
    int n = 1;
    double s = 0.5;
    Eigen::MatrixXd g_const;
    bool lebesgue_measure = false;

    std::shared_ptr<const MetricField> metric; // Numeric
    double split_radius = 1.0;                 // r: t0 = (r/4)^2
    NumericKernelOptions options;

    static KernelModel constant(int n, double s, const Eigen::MatrixXd& g,
                                bool lebesgue = false);
    static KernelModel euclidean(int n, double s);
    static KernelModel numeric(std::shared_ptr<const MetricField> metric, double s,
                               double split_radius, NumericKernelOptions opts = {});
};

struct KernelErrorBudget {
    double small_t_duhamel = 0.0; // omitted frozen-coefficient correction below t0
    double mid_quadrature = 0.0;  // time-quadrature estimate on [t0, T_max]
    double solver_spatial = 0.0;  // accumulated discrete defect of the heat marching
    double large_t = 0.0;         // mass-bound tail beyond T_max
    double box_tail = 0.0;        // spatial truncation at the walls

    double total() const {
        return small_t_duhamel + mid_quadrature + solver_spatial + large_t + box_tail;
    }
};

/// K(., y) on a grid for one source, produced by a single marching pass:
/// exact frozen closed form below t0 = (r/4)^2 and beyond T_max, numeric
/// heat snapshots in between. The field holds the correction
///   diff(x) = ∫_{t0}^{Tmax} t^{-1-s/2} (H_num - H_frozen)(t, x, y) dt,
/// so K(x,y) = cns |x-y|_{g(y)}^{-(n+s)} + diff(x) with every truncation
/// itemized in the budget. One field instance is the per-source cache the
/// estimate integrals reuse.
class NumericKernelField {
public:
    NumericKernelField(const KernelModel& model, const Eigen::VectorXd& y);

    const HeatGrid& grid() const { return grid_; }
    const Eigen::VectorXd& source() const { return y_; }
    double t0() const { return t0_; }
    double t_max() const { return t_max_; }
    const KernelErrorBudget& budget() const { return budget_; }
    const Eigen::MatrixXd& frozen_metric() const { return gy_; }
    double cns() const { return cns_; }
    double s() const { return s_; }

    /// frozen closed-form kernel of g(y) at a grid point
    double frozen_at(const Eigen::VectorXd& x) const;
    /// correction field at an equation index
    double diff_at(int eq) const { return diff_[eq]; }
    /// correction field interpolated off the lattice (it is smooth)
    double diff_interp(const Eigen::VectorXd& x) const;
    /// full kernel value at an equation index (throws on the source node)
    double value_at(int eq) const;
    /// frozen part split at t0 / T_max (incomplete-gamma factors)
    double small_t_part(const Eigen::VectorXd& x) const;
    double large_t_part(const Eigen::VectorXd& x) const;

private:
    HeatGrid grid_;
    Eigen::VectorXd y_;
    int src_eq_ = -1;
    int n_ = 1;
    double s_ = 0.5;
    double cns_ = 0.0;
    Eigen::MatrixXd gy_;
    Eigen::MatrixXd gy_chol_; // lower factor
    double t0_ = 0.0, t_max_ = 0.0;
    Eigen::VectorXd diff_;
    KernelErrorBudget budget_;
};

struct KernelPointValue {
    double value = 0.0;
    double small_t_part = 0.0;
    double large_t_part = 0.0;
    KernelErrorBudget error_budget;
};

/// Point evaluation of a numeric kernel model. Rejects x = y and points in
/// the padding collar of the solver box.
KernelPointValue kernel_numeric(const NumericKernelField& field, const Eigen::VectorXd& x);

} // namespace nmsurf
