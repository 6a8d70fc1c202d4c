#include "drsyn/product.hpp"

#include <algorithm>
#include <cmath>

#include "drsyn/error.hpp"
#include "drsyn/parallel.hpp"

namespace drsyn {

namespace {

constexpr double kImprovementTol = 1e-12;

}  // namespace

ProductRmdp::ProductRmdp(const RmdpAbstraction& base, ltlf::Dfa dfa, const LabelMap& labels)
    : base_(&base), dfa_(std::move(dfa)) {
    const std::size_t nq = base.num_states();
    const std::size_t na = base.num_actions();
    if (labels.num_states() != nq) throw InvalidInput("build_product: labels do not match the abstraction");
    if (dfa_.num_states == 0) throw InvalidInput("build_product: empty automaton");

    std::vector<int> bit_of_prop(labels.propositions().size(), -1);
    for (std::size_t i = 0; i < dfa_.ap.size(); ++i) {
        const int p = labels.find(dfa_.ap[i]);
        if (p < 0) throw InvalidInput("build_product: proposition '" + dfa_.ap[i] + "' is not a labeled region");
        bit_of_prop[static_cast<std::size_t>(p)] = static_cast<int>(i);
    }
    symbols_.assign(nq, 0);
    for (StateId q = 0; q < nq; ++q)
        for (int p : labels.labels(q))
            if (bit_of_prop[static_cast<std::size_t>(p)] >= 0) symbols_[q] |= ltlf::Symbol{1} << bit_of_prop[static_cast<std::size_t>(p)];

    const std::size_t nz = dfa_.num_states;
    succ_.resize(nz * nq);
    for (std::size_t z = 0; z < nz; ++z)
        for (StateId q = 0; q < nq; ++q) succ_[z * nq + q] = dfa_.step(static_cast<ltlf::DfaState>(z), symbols_[q]);

    // Backward reachability of accepting DFA states.
    dfa_live_.assign(nz, false);
    for (std::size_t z = 0; z < nz; ++z) dfa_live_[z] = dfa_.accepting[z];
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t z = 0; z < nz; ++z) {
            if (dfa_live_[z]) continue;
            for (std::size_t s = 0; s < dfa_.num_symbols(); ++s)
                if (dfa_live_[dfa_.delta[z * dfa_.num_symbols() + s]]) {
                    dfa_live_[z] = changed = true;
                    break;
                }
        }
    }

    rows_.resize(nq * na);
    sources_.resize(nq * na);
    parallel_for(nq * na, [&](std::size_t idx) {
        const StateId q = idx / na;
        const std::size_t a = idx % na;
        const auto& row = base.imdp.row(q, a);
        const auto& dests = base.restricted_support(q, a);
        InnerProblem& ip = rows_[idx];
        auto& src = sources_[idx];
        for (const auto& e : row) {
            src.push_back(e.dest);
            ip.lower.push_back(e.lower);
            ip.upper.push_back(e.upper);
        }
        ip.num_dests = dests.size();
        ip.theta = base.budget(q, a);
        ip.cost.resize(src.size() * dests.size());
        for (std::size_t i = 0; i < src.size(); ++i)
            for (std::size_t j = 0; j < dests.size(); ++j) ip.cost[i * dests.size() + j] = base.cost(src[i], dests[j]);
    });
}

bool ProductRmdp::accepting(std::size_t s) const {
    return !base_->partition.is_unsafe(base_state(s)) && dfa_.accepting[dfa_state(s)];
}

bool ProductRmdp::dead(std::size_t s) const {
    return base_->partition.is_unsafe(base_state(s)) || !dfa_live_[dfa_state(s)];
}

const std::vector<StateId>& ProductRmdp::row_sources(StateId q, std::size_t a) const {
    return sources_.at(q * num_actions() + a);
}

const std::vector<StateId>& ProductRmdp::row_dests(StateId q, std::size_t a) const {
    return base_->restricted_support(q, a);
}

ProductRmdp build_product(const RmdpAbstraction& rmdp, const ltlf::Dfa& dfa, const LabelMap& labels) {
    return ProductRmdp(rmdp, dfa, labels);
}

double bellman(const ProductRmdp& prod, std::size_t s, std::size_t a, const std::vector<double>& v, SolveMode mode) {
    const StateId q = prod.base_state(s);
    const ltlf::DfaState z = prod.dfa_state(s);
    const auto& dests = prod.row_dests(q, a);
    std::vector<double> vd(dests.size());
    bool constant = true;
    for (std::size_t j = 0; j < dests.size(); ++j) {
        vd[j] = v[prod.index(dests[j], prod.successor_z(z, dests[j]))];
        constant = constant && vd[j] == vd[0];
    }
    if (constant) return vd[0];
    const InnerProblem& ip = prod.row_problem(q, a);
    const double val = mode == SolveMode::Pessimistic ? inner_worst_expectation(ip, vd).value
                                                      : inner_best_expectation(ip, vd).value;
    return std::clamp(val, 0.0, 1.0);
}

ValueIterationResult robust_value_iteration(const ProductRmdp& prod, SolveMode mode, const SolveOptions& opts,
                                            const Strategy* fixed) {
    if (!(opts.tol > 0.0)) throw InvalidInput("robust_value_iteration: tolerance must be positive");
    if (opts.max_iter == 0) throw InvalidInput("robust_value_iteration: max_iter must be positive");
    const std::size_t n = prod.num_states();
    const std::size_t na = prod.num_actions();
    if (fixed && fixed->action.size() != n) throw InvalidInput("robust_value_iteration: strategy has the wrong size");

    ValueIterationResult r;
    r.values.assign(n, 0.0);
    r.strategy.action.assign(n, 0);
    if (fixed) r.strategy = *fixed;
    std::vector<std::size_t> active;
    for (std::size_t s = 0; s < n; ++s) {
        if (prod.accepting(s)) r.values[s] = 1.0;
        else if (!prod.dead(s)) active.push_back(s);
    }

    std::vector<double> next = r.values;
    std::vector<double> delta(active.size());
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        parallel_for(active.size(), [&](std::size_t k) {
            const std::size_t s = active[k];
            double val;
            if (fixed) {
                val = bellman(prod, s, fixed->action[s], r.values, mode);
            } else {
                std::size_t& cur = r.strategy.action[s];
                double cur_val = -1.0, best = -1.0;
                std::size_t best_a = 0;
                for (std::size_t a = 0; a < na; ++a) {
                    const double va = bellman(prod, s, a, r.values, mode);
                    if (a == cur) cur_val = va;
                    if (va > best) {
                        best = va;
                        best_a = a;
                    }
                }
                if (best > cur_val + kImprovementTol) cur = best_a;
                val = best;
            }
            next[s] = val;
            delta[k] = std::abs(val - r.values[s]);
        });
        r.values.swap(next);
        r.residual = delta.empty() ? 0.0 : *std::max_element(delta.begin(), delta.end());
        r.residual_history.push_back(r.residual);
        r.iterations = it;
        if (it >= opts.min_iter && r.residual < opts.tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

Solution solve(const ProductRmdp& prod, const SolveOptions& opts) {
    Solution sol;
    sol.synthesis = robust_value_iteration(prod, SolveMode::Pessimistic, opts);
    sol.strategy = extract_strategy(prod, sol.synthesis);
    const auto lo = robust_value_iteration(prod, SolveMode::Pessimistic, opts, &sol.strategy);
    // Both evaluations rise monotonically from zero, so the optimistic one
    // dominates the pessimistic one only after at least as many sweeps.
    SolveOptions hi_opts = opts;
    hi_opts.min_iter = std::max(opts.min_iter, lo.iterations);
    const auto hi = robust_value_iteration(prod, SolveMode::Optimistic, hi_opts, &sol.strategy);
    sol.bounds.p_lower = lo.values;
    sol.bounds.p_upper = hi.values;
    sol.bounds.iterations = sol.synthesis.iterations;
    sol.bounds.residual = std::max({sol.synthesis.residual, lo.residual, hi.residual});
    sol.bounds.converged = sol.synthesis.converged && lo.converged && hi.converged;
    return sol;
}

Strategy extract_strategy(const ProductRmdp& prod, const ValueIterationResult& pessimistic) {
    if (pessimistic.strategy.action.size() != prod.num_states())
        throw InvalidInput("extract_strategy: run does not match the product");
    Strategy s = pessimistic.strategy;
    for (std::size_t i = 0; i < s.action.size(); ++i)
        if (s.action[i] >= prod.num_actions()) throw InvalidInput("extract_strategy: action out of range");
    return s;
}

}  // namespace drsyn
