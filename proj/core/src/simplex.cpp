#include "drsyn/simplex.hpp"

#include <cmath>
#include <limits>

#include "drsyn/error.hpp"

namespace drsyn {

namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    // Row m_ holds the reduced costs; its rhs entry is minus the objective.
    double& cost(std::size_t c) { return at(m_, c); }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = at(i, c);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
        }
        basis_[r] = c;
    }

    // Bland's rule restricted to the allowed columns.
    LpResult::Status run(const std::vector<bool>& allowed, std::size_t& pivots, std::size_t max_pivots) {
        while (true) {
            std::size_t enter = n_;
            for (std::size_t j = 0; j < n_; ++j)
                if (allowed[j] && cost(j) < -kPivotTol) {
                    enter = j;
                    break;
                }
            if (enter == n_) return LpResult::Status::Optimal;
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = rhs(i) / a;
                if (leave == m_ || ratio < best - 1e-14) {
                    best = ratio;
                    leave = i;
                } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leave]) {
                    leave = i;
                }
            }
            if (leave == m_) return LpResult::Status::Unbounded;
            if (++pivots > max_pivots) return LpResult::Status::IterationLimit;
            pivot(leave, enter);
        }
    }

    std::size_t m_, n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& lp, std::size_t max_pivots) {
    if (lp.objective.size() != lp.num_vars) throw InvalidInput("solve_lp: objective size mismatch");
    const std::size_t m = lp.rows.size();
    const std::size_t n = lp.num_vars;

    // Normalize to nonnegative right-hand sides and count auxiliary columns.
    std::vector<double> sign(m, 1.0);
    std::vector<LpProblem::Sense> sense(m);
    std::size_t slacks = 0, artificials = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sense[i] = lp.rows[i].sense;
        if (lp.rows[i].rhs < 0.0) {
            sign[i] = -1.0;
            if (sense[i] == LpProblem::Sense::Le) sense[i] = LpProblem::Sense::Ge;
            else if (sense[i] == LpProblem::Sense::Ge) sense[i] = LpProblem::Sense::Le;
        }
        if (sense[i] != LpProblem::Sense::Eq) ++slacks;
        if (sense[i] != LpProblem::Sense::Le) ++artificials;
    }
    const std::size_t cols = n + slacks + artificials;
    Tableau t(m, cols);
    std::vector<bool> is_artificial(cols, false);
    std::size_t next_slack = n, next_art = n + slacks;
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& [j, a] : lp.rows[i].coeffs) {
            if (j >= n) throw InvalidInput("solve_lp: coefficient index out of range");
            t.at(i, j) += sign[i] * a;
        }
        t.rhs(i) = sign[i] * lp.rows[i].rhs;
        if (sense[i] == LpProblem::Sense::Le) {
            t.at(i, next_slack) = 1.0;
            t.basis_[i] = next_slack++;
        } else {
            if (sense[i] == LpProblem::Sense::Ge) t.at(i, next_slack++) = -1.0;
            t.at(i, next_art) = 1.0;
            is_artificial[next_art] = true;
            t.basis_[i] = next_art++;
        }
    }

    std::size_t pivots = 0;
    std::vector<bool> allowed(cols, true);
    LpResult result;

    // Phase 1: minimize the sum of artificials.
    if (artificials > 0) {
        for (std::size_t i = 0; i < m; ++i)
            if (is_artificial[t.basis_[i]])
                for (std::size_t j = 0; j <= cols; ++j)
                    if (j == cols || !is_artificial[j]) t.at(m, j) -= t.at(i, j);
        const auto st = t.run(allowed, pivots, max_pivots);
        if (st == LpResult::Status::IterationLimit) {
            result.status = st;
            return result;
        }
        if (-t.rhs(m) > 1e-9) {
            result.status = LpResult::Status::Infeasible;
            return result;
        }
        // Drive basic artificials out where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_artificial[t.basis_[i]]) continue;
            for (std::size_t j = 0; j < cols; ++j)
                if (!is_artificial[j] && std::abs(t.at(i, j)) > kPivotTol) {
                    t.pivot(i, j);
                    break;
                }
        }
        for (std::size_t j = 0; j < cols; ++j)
            if (is_artificial[j]) allowed[j] = false;
    }

    // Phase 2.
    for (std::size_t j = 0; j <= cols; ++j) t.cost(j) = 0.0;
    for (std::size_t j = 0; j < n; ++j) t.cost(j) = lp.objective[j];
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t b = t.basis_[i];
        const double cb = t.cost(b);
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= cols; ++j) t.at(m, j) -= cb * t.at(i, j);
    }
    result.status = t.run(allowed, pivots, max_pivots);
    if (result.status != LpResult::Status::Optimal) return result;
    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis_[i] < n) result.x[t.basis_[i]] = std::max(0.0, t.rhs(i));
    result.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.value += lp.objective[j] * result.x[j];
    return result;
}

}  // namespace drsyn
