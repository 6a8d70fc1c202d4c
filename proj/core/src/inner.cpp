#include "drsyn/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "drsyn/error.hpp"
#include "drsyn/simplex.hpp"

namespace drsyn {

namespace {

constexpr double kGapTol = 1e-13;
constexpr int kMaxDualSteps = 200;

// Greedy fill of the interval row in the given order; returns g.
std::vector<double> fill_in_order(std::span<const double> lower, std::span<const double> upper,
                                  const std::vector<std::size_t>& order) {
    std::vector<double> g(lower.begin(), lower.end());
    double rem = 1.0 - std::accumulate(lower.begin(), lower.end(), 0.0);
    for (std::size_t i : order) {
        if (rem <= 0.0) break;
        const double add = std::min(upper[i] - lower[i], rem);
        g[i] += add;
        rem -= add;
    }
    return g;
}

struct Lagrangian {
    double g = 0.0;      // dual function value
    double spent = 0.0;  // transport cost of the primal minimizer
    std::vector<double> source;
    std::vector<std::size_t> choice;  // destination per source
};

// Minimizes sum_i g_i h_i over the interval row with
// h_i = min_j V_j + lambda c_ij; ties prefer the cheapest transport.
Lagrangian evaluate(const InnerProblem& p, std::span<const double> v, double lambda) {
    const std::size_t ns = p.num_sources();
    std::vector<double> h(ns), hc(ns);
    Lagrangian out;
    out.choice.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        double best = std::numeric_limits<double>::infinity(), best_c = 0.0;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < p.num_dests; ++j) {
            const double cij = p.c(i, j);
            const double val = v[j] + lambda * cij;
            if (val < best || (val == best && cij < best_c)) {
                best = val;
                best_c = cij;
                arg = j;
            }
        }
        h[i] = best;
        hc[i] = best_c;
        out.choice[i] = arg;
    }
    std::vector<std::size_t> order(ns);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (h[a] != h[b]) return h[a] < h[b];
        if (hc[a] != hc[b]) return hc[a] < hc[b];
        return a < b;
    });
    out.source = fill_in_order(p.lower, p.upper, order);
    for (std::size_t i = 0; i < ns; ++i) {
        out.g += out.source[i] * h[i];
        out.spent += out.source[i] * hc[i];
    }
    out.g -= lambda * p.theta;
    return out;
}

void add_plan(InnerResult& r, const InnerProblem& p, const Lagrangian& l, double weight) {
    for (std::size_t i = 0; i < p.num_sources(); ++i) {
        const double m = weight * l.source[i];
        r.source[i] += m;
        r.plan[i * p.num_dests + l.choice[i]] += m;
        r.marginal[l.choice[i]] += m;
    }
}

InnerResult solve_worst(const InnerProblem& p, std::span<const double> v) {
    p.validate();
    if (v.size() != p.num_dests) throw InvalidInput("inner problem: value vector has the wrong size");
    const std::size_t ns = p.num_sources();
    InnerResult r;
    r.source.assign(ns, 0.0);
    r.plan.assign(ns * p.num_dests, 0.0);
    r.marginal.assign(p.num_dests, 0.0);

    Lagrangian lo = evaluate(p, v, 0.0);
    if (lo.spent <= p.theta) {
        r.value = lo.g;
        add_plan(r, p, lo, 1.0);
        return r;
    }

    // Beyond lambda_max no positive-cost move can beat staying put.
    const auto [vmin, vmax] = std::minmax_element(v.begin(), v.end());
    double cmin = std::numeric_limits<double>::infinity();
    for (double c : p.cost)
        if (c > 0.0) cmin = std::min(cmin, c);
    double lam_lo = 0.0;
    double lam_hi = (*vmax - *vmin) / cmin + 1.0;
    Lagrangian hi = evaluate(p, v, lam_hi);

    for (int step = 0; step < kMaxDualSteps; ++step) {
        const double s_lo = lo.spent - p.theta;
        const double s_hi = hi.spent - p.theta;
        if (s_hi >= 0.0 || s_lo <= 0.0 || lam_hi - lam_lo <= 0.0) break;
        double lam = (hi.g - lo.g + s_lo * lam_lo - s_hi * lam_hi) / (s_lo - s_hi);
        lam = std::clamp(lam, lam_lo, lam_hi);
        const double ub = std::min(lo.g + s_lo * (lam - lam_lo), hi.g + s_hi * (lam - lam_hi));
        if (ub - std::max(lo.g, hi.g) <= kGapTol || lam == lam_lo || lam == lam_hi) break;
        Lagrangian mid = evaluate(p, v, lam);
        const double s_mid = mid.spent - p.theta;
        if (s_mid > 0.0) {
            lo = std::move(mid);
            lam_lo = lam;
        } else {
            hi = std::move(mid);
            lam_hi = lam;
            if (s_mid == 0.0) break;
        }
    }

    // Feasible witness: blend the over-budget and within-budget primals so
    // the budget binds.
    r.value = std::max(lo.g, hi.g);
    if (hi.spent >= p.theta || lo.spent <= hi.spent) {
        add_plan(r, p, hi, 1.0);
    } else {
        const double t = (p.theta - hi.spent) / (lo.spent - hi.spent);
        add_plan(r, p, lo, t);
        add_plan(r, p, hi, 1.0 - t);
    }
    return r;
}

}  // namespace

void InnerProblem::validate() const {
    const std::size_t ns = num_sources();
    if (ns == 0 || upper.size() != ns) throw InvalidInput("inner problem: empty or inconsistent interval row");
    if (num_dests == 0 || cost.size() != ns * num_dests) throw InvalidInput("inner problem: cost matrix has the wrong shape");
    if (!(theta >= 0.0)) throw InvalidInput("inner problem: negative transport budget");
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        if (!(lower[i] >= 0.0 && lower[i] <= upper[i]))
            throw InvalidInput("inner problem: interval " + std::to_string(i) + " is malformed");
        lo += lower[i];
        hi += upper[i];
        bool stay = false;
        for (std::size_t j = 0; j < num_dests; ++j) {
            if (!(cost[i * num_dests + j] >= 0.0)) throw InvalidInput("inner problem: negative cost");
            stay = stay || cost[i * num_dests + j] == 0.0;
        }
        if (!stay) throw InvalidInput("inner problem: source " + std::to_string(i) + " has no zero-cost destination");
    }
    if (lo > 1.0 + 1e-9 || hi < 1.0 - 1e-9)
        throw NumericalError("inner problem: infeasible interval row (sum lower = " + std::to_string(lo) +
                             ", sum upper = " + std::to_string(hi) + ")");
}

InnerResult inner_worst_expectation(const InnerProblem& p, std::span<const double> v) { return solve_worst(p, v); }

InnerResult inner_best_expectation(const InnerProblem& p, std::span<const double> v) {
    std::vector<double> neg(v.begin(), v.end());
    for (double& x : neg) x = -x;
    InnerResult r = solve_worst(p, neg);
    r.value = -r.value;
    return r;
}

InnerResult inner_expectation_lp(const InnerProblem& p, std::span<const double> v, Direction dir) {
    p.validate();
    if (v.size() != p.num_dests) throw InvalidInput("inner problem: value vector has the wrong size");
    const std::size_t ns = p.num_sources(), nd = p.num_dests;
    const double sgn = dir == Direction::Worst ? 1.0 : -1.0;
    LpProblem lp;
    lp.num_vars = ns * nd;
    lp.objective.resize(lp.num_vars);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nd; ++j) lp.objective[i * nd + j] = sgn * v[j];
    using S = LpProblem::Sense;
    LpProblem::Row mass{{}, S::Eq, 1.0}, budget{{}, S::Le, p.theta};
    for (std::size_t i = 0; i < ns; ++i) {
        LpProblem::Row lo{{}, S::Ge, p.lower[i]}, hi{{}, S::Le, p.upper[i]};
        for (std::size_t j = 0; j < nd; ++j) {
            lo.coeffs.emplace_back(i * nd + j, 1.0);
            hi.coeffs.emplace_back(i * nd + j, 1.0);
            mass.coeffs.emplace_back(i * nd + j, 1.0);
            if (p.c(i, j) != 0.0) budget.coeffs.emplace_back(i * nd + j, p.c(i, j));
        }
        if (p.lower[i] > 0.0) lp.rows.push_back(std::move(lo));
        lp.rows.push_back(std::move(hi));
    }
    lp.rows.push_back(std::move(mass));
    lp.rows.push_back(std::move(budget));
    const LpResult res = solve_lp(lp);
    if (res.status != LpResult::Status::Optimal) throw NumericalError("inner problem: simplex did not reach an optimum");
    InnerResult r;
    r.value = sgn * res.value;
    r.plan = res.x;
    r.source.assign(ns, 0.0);
    r.marginal.assign(nd, 0.0);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nd; ++j) {
            r.source[i] += res.x[i * nd + j];
            r.marginal[j] += res.x[i * nd + j];
        }
    return r;
}

double greedy_interval_expectation(std::span<const double> lower, std::span<const double> upper,
                                   std::span<const double> v, Direction dir, std::vector<double>* dist) {
    if (lower.size() != upper.size() || lower.size() != v.size() || lower.empty())
        throw InvalidInput("greedy_interval_expectation: inconsistent sizes");
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dir == Direction::Worst ? v[a] < v[b] : v[a] > v[b];
    });
    std::vector<double> g = fill_in_order(lower, upper, order);
    double value = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) value += g[i] * v[i];
    if (dist) *dist = std::move(g);
    return value;
}

double witness_violation(const InnerProblem& p, const InnerResult& r) {
    const std::size_t ns = p.num_sources(), nd = p.num_dests;
    double worst = 0.0;
    auto note = [&](double x) { worst = std::max(worst, x); };
    double mass = 0.0, spent = 0.0;
    std::vector<double> col(nd, 0.0);
    for (std::size_t i = 0; i < ns; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nd; ++j) {
            const double x = r.plan[i * nd + j];
            note(-x);
            row += x;
            col[j] += x;
            spent += p.c(i, j) * x;
        }
        note(std::abs(row - r.source[i]));
        note(p.lower[i] - r.source[i]);
        note(r.source[i] - p.upper[i]);
        mass += r.source[i];
    }
    for (std::size_t j = 0; j < nd; ++j) note(std::abs(col[j] - r.marginal[j]));
    note(std::abs(mass - 1.0));
    note(spent - p.theta);
    return worst;
}

}  // namespace drsyn
