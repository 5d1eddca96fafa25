#include "nmsurf/solver/graph_flow.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "nmsurf/kernel/normalization.hpp"
#include "nmsurf/util/quadrature.hpp"

namespace nmsurf {

namespace {

/// Phi(xi) = ∫_0^xi (1+u^2)^{-(2+s)/2} du = ∫_0^{atan xi} cos^s(theta) dtheta,
/// tabulated once per s on a uniform theta grid (odd function).
class PhiTable {
public:
    explicit PhiTable(double s) : s_(s) {
        const int m = 4096;
        table_.resize(m + 1);
        table_[0] = 0.0;
        double h = 0.5 * M_PI / m;
        double prev = 1.0; // cos^s(0)
        for (int i = 1; i <= m; ++i) {
            double th = i * h;
            double mid = std::pow(std::cos(th - 0.5 * h), s_);
            double cur = std::pow(std::cos(std::min(th, 0.5 * M_PI * (1.0 - 1e-12))), s_);
            table_[size_t(i)] = table_[size_t(i - 1)] + h * (prev + 4.0 * mid + cur) / 6.0;
            prev = cur;
        }
        step_ = h;
    }

    double operator()(double xi) const {
        double a = std::atan(std::abs(xi));
        double t = a / step_;
        int i = std::min(int(table_.size()) - 2, int(t));
        double u = t - i;
        double v = (1.0 - u) * table_[size_t(i)] + u * table_[size_t(i + 1)];
        return xi < 0.0 ? -v : v;
    }

private:
    double s_;
    double step_;
    std::vector<double> table_;
};

const PhiTable& phi_table(double s) {
    static thread_local double cached_s = -1.0;
    static thread_local std::unique_ptr<PhiTable> table;
    if (!table || cached_s != s) {
        table = std::make_unique<PhiTable>(s);
        cached_s = s;
    }
    return *table;
}

} // namespace

double nmc_graph_operator(const GraphState& state, double x, const GraphFlowOptions& opts) {
    const double s = state.s;
    const PhiTable& phi = phi_table(s);
    const double cns = KernelNormalization(2, s).value;
    const GraphFn& f = state.f;
    const double f0 = f.eval(x);

    auto paired = [&](double d) {
        double a = (f.eval(x + d) - f0) / d;
        double b = (f.eval(x - d) - f0) / d;
        return 2.0 * cns * std::pow(d, -1.0 - s) * (phi(a) + phi(-b));
    };
    int octaves = std::max(1, int(std::ceil(std::log2(opts.quad_outer / opts.inner_cutoff))));
    return integrate_geometric(paired, opts.inner_cutoff, opts.quad_outer,
                               octaves * opts.segments_per_octave, opts.gl_nodes);
}

Eigen::VectorXd graph_residual(const GraphState& state, const GraphFlowOptions& opts) {
    Eigen::VectorXd r(state.free_nodes.size());
    double h = state.f.spacing();
    for (std::size_t i = 0; i < state.free_nodes.size(); ++i) {
        double x = state.f.lo + double(state.free_nodes[i]) * h;
        r[long(i)] = nmc_graph_operator(state, x, opts);
    }
    return r;
}

GraphState flow_step(const GraphState& state, double& tau, const GraphFlowOptions& opts) {
    if (tau <= 0.0) throw std::invalid_argument("flow_step: tau must be positive");
    Eigen::VectorXd h_s = graph_residual(state, opts);
    double res0 = h_s.size() ? h_s.cwiseAbs().maxCoeff() : 0.0;

    while (true) {
        GraphState next = state;
        for (std::size_t i = 0; i < state.free_nodes.size(); ++i)
            next.f.values[state.free_nodes[i]] += tau * h_s[long(i)];
        Eigen::VectorXd r_next = graph_residual(next, opts);
        next.residual = r_next.size() ? r_next.cwiseAbs().maxCoeff() : 0.0;
        if (next.residual <= opts.backtrack_factor * res0 || res0 == 0.0) return next;
        tau *= 0.5;
        if (tau < opts.tau_floor) {
            std::ostringstream os;
            os << "flow_step: step size underflow (residual " << res0 << " -> " << next.residual
               << ")";
            throw std::runtime_error(os.str());
        }
    }
}

GraphState solve_minimal_graph(const std::function<double(double)>& exterior_data,
                               double exterior_bound, double s, double tol,
                               SolveGraphReport* report, GraphFlowOptions opts) {
    if (opts.interior_points > 513)
        throw std::invalid_argument("solve_minimal_graph: grid exceeds the desk-scale cap");
    GraphState state;
    state.s = s;
    state.f = GraphFn::from_callable(exterior_data, -1.0, 1.0, opts.interior_points,
                                     exterior_bound);
    for (std::size_t i = 1; i + 1 < state.f.values.size(); ++i) state.free_nodes.push_back(i);
    state.residual = graph_residual(state, opts).cwiseAbs().maxCoeff();

    double h = state.f.spacing();
    double tau_cap = opts.step_cap_factor * std::pow(h, s);
    // linearized stability at the grid Nyquist frequency
    double cns = KernelNormalization(2, s).value;
    double msym = 2.0 * cns *
                  integrate_geometric(
                      [s](double u) { return (1.0 - std::cos(u)) * std::pow(u, -2.0 - s); },
                      1e-8, 400.0, 70, 12);
    double tau_stable = 1.8 / (msym * std::pow(M_PI / h, 1.0 + s));
    double tau = std::min(tau_cap, tau_stable);

    SolveGraphReport rep;
    rep.residual_trace.push_back(state.residual);
    for (int it = 0; it < opts.max_iters; ++it) {
        if (state.residual <= tol) {
            rep.converged = true;
            break;
        }
        state = flow_step(state, tau, opts);
        rep.iterations = it + 1;
        rep.residual_trace.push_back(state.residual);
        tau = std::min(tau * 1.2, std::min(tau_cap, 4.0 * tau_stable));
    }
    rep.converged = state.residual <= tol;
    rep.final_residual = state.residual;
    rep.final_tau = tau;
    if (report) *report = rep;
    return state;
}

} // namespace nmsurf
