#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace drsyn {

/// minimize objective . x  subject to the rows and x >= 0.
struct LpProblem {
    enum class Sense { Le, Ge, Eq };
    struct Row {
        std::vector<std::pair<std::size_t, double>> coeffs;
        Sense sense = Sense::Le;
        double rhs = 0.0;
    };

    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<Row> rows;
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };
    Status status = Status::Infeasible;
    double value = 0.0;
    std::vector<double> x;
};

/// Dense two-phase tableau simplex with Bland's anti-cycling rule.
LpResult solve_lp(const LpProblem& lp, std::size_t max_pivots = 200000);

}  // namespace drsyn
