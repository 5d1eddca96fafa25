#pragma once

#include <functional>
#include <vector>

#include "nmsurf/core/region.hpp"

namespace nmsurf {

/// Graph over B'_1 = [-1, 1] with closed-form exterior data and the
/// sup-norm NMC residual of the current iterate.
struct GraphState {
    GraphFn f;
    double s = 0.5;
    double residual = 0.0;
    std::vector<size_t> free_nodes; // evolved interior indices (collar pinned)
};

struct GraphFlowOptions {
    int interior_points = 511;     // grid points across [-1, 1], <= 512 cap
    double step_cap_factor = 0.5;  // spec cap tau <= c h^s
    double backtrack_factor = 1.0 + 1e-9;
    int max_iters = 4000;
    double tau_floor = 1e-12;
    double quad_outer = 64.0;      // column integral cutoff
    double inner_cutoff = 1e-7;
    int gl_nodes = 10;
    int segments_per_octave = 2;
};

/// NMC of {x^n < f} at (x, f(x)) through the column reduction of the
/// subgraph integral: per horizontal offset d the vertical integral of the
/// paired indicator has the closed form 2 cns |d|^{-1-s} Phi(df/|d|), and the
/// d-integral is paired antipodally. Agrees with nmc_pv on subgraph regions
/// (covered by tests); this path is what the flow iterates.
double nmc_graph_operator(const GraphState& state, double x, const GraphFlowOptions& opts = {});

/// residual field at the evolved nodes
Eigen::VectorXd graph_residual(const GraphState& state, const GraphFlowOptions& opts = {});

/// One damped explicit step f <- f + tau H_s[f] with backtracking: a step
/// that increases the residual is rejected and retried at tau/2.
/// (The paper's sign convention chi_E - chi_CE makes +tau the descent
/// direction for subgraphs.)
GraphState flow_step(const GraphState& state, double& tau, const GraphFlowOptions& opts = {});

struct SolveGraphReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    double final_tau = 0.0;
    std::vector<double> residual_trace;
};

GraphState solve_minimal_graph(const std::function<double(double)>& exterior_data,
                               double exterior_bound, double s, double tol,
                               SolveGraphReport* report = nullptr, GraphFlowOptions opts = {});

} // namespace nmsurf
