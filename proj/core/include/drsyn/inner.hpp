#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drsyn {

enum class Direction { Worst, Best };

/// Transport-relaxed interval row for one (q, a):
///   optimize  sum_{i,j} V_j pi_ij
///   s.t.      pi >= 0,  sum_j pi_ij = g_i,  lower_i <= g_i <= upper_i,  sum_i g_i = 1,
///             sum_{i,j} cost_ij pi_ij <= theta
/// over sources i (the interval support) and destinations j.
struct InnerProblem {
    std::vector<double> lower;     // per source
    std::vector<double> upper;     // per source
    std::size_t num_dests = 0;
    std::vector<double> cost;      // sources x dests, row-major
    double theta = 0.0;

    std::size_t num_sources() const { return lower.size(); }
    double c(std::size_t i, std::size_t j) const { return cost[i * num_dests + j]; }
    /// Throws InvalidInput on shape errors, negative costs or budget, or a
    /// source without a zero-cost destination; NumericalError when the
    /// interval row is infeasible.
    void validate() const;
};

struct InnerResult {
    double value = 0.0;
    std::vector<double> source;    // g, per source
    std::vector<double> marginal;  // sum_i pi_ij, per destination
    std::vector<double> plan;      // pi, sources x dests
};

/// Exact optimum through the Lagrangian dual of the budget constraint: a
/// one-dimensional concave piecewise-linear maximization whose evaluations
/// are greedy interval problems. The reported value is the dual bound, so it
/// never overstates the minimum (Worst) or understates the maximum (Best).
InnerResult inner_worst_expectation(const InnerProblem& p, std::span<const double> v);
InnerResult inner_best_expectation(const InnerProblem& p, std::span<const double> v);

/// Same optimum computed by the dense simplex on the full coupling LP.
InnerResult inner_expectation_lp(const InnerProblem& p, std::span<const double> v, Direction dir);

/// Classical ordering-based extremum of sum_i g_i v_i over the interval row
/// alone (no transport). `dist`, when given, receives the optimal g.
double greedy_interval_expectation(std::span<const double> lower, std::span<const double> upper,
                                   std::span<const double> v, Direction dir, std::vector<double>* dist = nullptr);

/// Largest constraint violation of a witness (marginals, bounds, mass, budget, consistency).
double witness_violation(const InnerProblem& p, const InnerResult& r);

}  // namespace drsyn
