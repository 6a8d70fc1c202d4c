#pragma once

#include <cstddef>
#include <vector>

#include "drsyn/abstraction.hpp"
#include "drsyn/geometry.hpp"
#include "drsyn/inner.hpp"
#include "drsyn/ltlf.hpp"

namespace drsyn {

/// Product of the robust abstraction with a DFA. State (q, z) has index
/// q * |Z| + z; mass sent to q' from (q, z) lands in (q', delta(z, L(q'))).
/// Holds a reference to the abstraction, which must outlive it.
class ProductRmdp {
public:
    ProductRmdp(const RmdpAbstraction& base, ltlf::Dfa dfa, const LabelMap& labels);

    const RmdpAbstraction& base() const { return *base_; }
    const ltlf::Dfa& dfa() const { return dfa_; }
    std::size_t num_base_states() const { return base_->num_states(); }
    std::size_t num_dfa_states() const { return dfa_.num_states; }
    std::size_t num_states() const { return num_base_states() * num_dfa_states(); }
    std::size_t num_actions() const { return base_->num_actions(); }
    std::size_t index(StateId q, ltlf::DfaState z) const { return q * num_dfa_states() + z; }
    StateId base_state(std::size_t s) const { return s / num_dfa_states(); }
    ltlf::DfaState dfa_state(std::size_t s) const { return static_cast<ltlf::DfaState>(s % num_dfa_states()); }

    ltlf::Symbol symbol(StateId q) const { return symbols_[q]; }
    ltlf::DfaState successor_z(ltlf::DfaState z, StateId q2) const { return succ_[z * num_base_states() + q2]; }
    /// Product state entered when the run starts in q.
    std::size_t initial_state(StateId q) const { return index(q, successor_z(dfa_.initial, q)); }

    /// Safe q with accepting z.
    bool accepting(std::size_t s) const;
    /// States whose value is 0 under every strategy: the unsafe state and DFA
    /// states from which no accepting state is reachable.
    bool dead(std::size_t s) const;

    /// Inner problem of base row (q, a): sources are the interval support,
    /// destinations the restricted support.
    const InnerProblem& row_problem(StateId q, std::size_t a) const { return rows_[q * num_actions() + a]; }
    const std::vector<StateId>& row_sources(StateId q, std::size_t a) const;
    const std::vector<StateId>& row_dests(StateId q, std::size_t a) const;

private:
    const RmdpAbstraction* base_;
    ltlf::Dfa dfa_;
    std::vector<ltlf::Symbol> symbols_;
    std::vector<ltlf::DfaState> succ_;
    std::vector<bool> dfa_live_;
    std::vector<InnerProblem> rows_;
    std::vector<std::vector<StateId>> sources_;
};

/// Throws InvalidInput when a DFA proposition is missing from the labels.
ProductRmdp build_product(const RmdpAbstraction& rmdp, const ltlf::Dfa& dfa, const LabelMap& labels);

enum class SolveMode { Pessimistic, Optimistic };

/// Memory-dependent strategy: one action per product state.
struct Strategy {
    std::vector<std::size_t> action;
};

struct SolveOptions {
    double tol = 1e-6;
    std::size_t max_iter = 10000;
    /// Sweeps run before the tolerance test applies.
    std::size_t min_iter = 0;
};

struct ValueIterationResult {
    std::vector<double> values;
    Strategy strategy;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

/// Jacobi value iteration for robust reachability of the accepting states.
/// Without `fixed`, maximizes over actions against the chosen adversary and
/// records the maximizing action, switching only on strict improvement
/// (lowest index first). With `fixed`, evaluates that strategy.
ValueIterationResult robust_value_iteration(const ProductRmdp& prod, SolveMode mode, const SolveOptions& opts = {},
                                            const Strategy* fixed = nullptr);

struct ValueBounds {
    std::vector<double> p_lower;
    std::vector<double> p_upper;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Robust strategy and its certified bounds: the pessimistic iteration picks
/// the strategy, then both bounds are evaluations of that fixed strategy
/// against the minimizing and maximizing adversary.
struct Solution {
    ValueBounds bounds;
    Strategy strategy;
    ValueIterationResult synthesis;
};

Solution solve(const ProductRmdp& prod, const SolveOptions& opts = {});

/// The action table recorded by a pessimistic synthesis run. Throws
/// InvalidInput if the run does not belong to `prod`.
Strategy extract_strategy(const ProductRmdp& prod, const ValueIterationResult& pessimistic);

/// Bellman update of one product state under action a.
double bellman(const ProductRmdp& prod, std::size_t s, std::size_t a, const std::vector<double>& v, SolveMode mode);

}  // namespace drsyn
