#pragma once

#include <string>
#include <vector>

#include "drsyn/ambiguity.hpp"
#include "drsyn/dynamics.hpp"
#include "drsyn/geometry.hpp"

namespace drsyn {

/// Slack added to reach boxes before intersection / containment tests: it can
/// only enlarge upper bounds and shrink lower bounds.
inline constexpr double kReachSlack = 1e-12;

struct IntervalEntry {
    StateId dest = 0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Interval MDP over the partition states (safe cells plus the unsafe state).
/// Rows are sparse, keyed by (q, a), with destinations in increasing order.
class ImdpAbstraction {
public:
    using Row = std::vector<IntervalEntry>;

    ImdpAbstraction() = default;
    ImdpAbstraction(std::size_t num_states, std::size_t num_actions);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    const Row& row(StateId q, std::size_t a) const { return rows_.at(q * num_actions_ + a); }
    Row& row(StateId q, std::size_t a) { return rows_.at(q * num_actions_ + a); }
    /// Zero when q2 is not in the row.
    double lower(StateId q, std::size_t a, StateId q2) const;
    double upper(StateId q, std::size_t a, StateId q2) const;
    std::size_t nonzeros() const;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<Row> rows_;
};

/// Empirical IMDP: for each safe q, action a and center atom w_i with weight
/// u_i, R = Reach(q, a, w_i) adds u_i to the upper bound of every state it
/// meets and to the lower bound of a state that contains it. The unsafe state
/// is absorbing.
ImdpAbstraction build_imdp(const SystemModel& m, const Partition& p, const DiscreteDistribution& center);

struct IntervalViolation {
    StateId q = 0;
    std::size_t a = 0;
    /// Destination for per-entry violations; equal to q for row-level ones.
    StateId dest = 0;
    std::string message;
};

/// Checks 0 <= lower <= upper <= 1, sum(lower) <= 1 <= sum(upper) per row and
/// that `unsafe` is absorbing. Sums use a 1e-9 tolerance.
std::vector<IntervalViolation> validate_interval_structure(const ImdpAbstraction& imdp, StateId unsafe);

/// Robust MDP: the IMDP rows plus, for each (q, a), a transport budget
/// theta = (L_w(q, a) * radius)^s over the cell cost and the restricted
/// destination set Q_{q,a}.
struct RmdpAbstraction {
    ImdpAbstraction imdp;
    Partition partition;
    std::vector<double> theta;                          // indexed q * A + a
    std::vector<std::vector<StateId>> restricted;       // indexed q * A + a, sorted
    Norm norm = Norm::Inf;
    int order = 1;
    double radius = 0.0;

    std::size_t num_states() const { return imdp.num_states(); }
    std::size_t num_actions() const { return imdp.num_actions(); }
    double budget(StateId q, std::size_t a) const { return theta.at(q * num_actions() + a); }
    const std::vector<StateId>& restricted_support(StateId q, std::size_t a) const {
        return restricted.at(q * num_actions() + a);
    }
    double cost(StateId q, StateId q2) const { return cell_cost(partition, q, q2, norm, order); }
};

RmdpAbstraction build_rmdp(ImdpAbstraction imdp, const SystemModel& m, const Partition& p, const AmbiguityBall& ball);

struct AbstractionStats {
    std::size_t nonzeros = 0;
    double average_support = 0.0;
    double average_restricted_support = 0.0;
};

AbstractionStats abstraction_stats(const RmdpAbstraction& rmdp);

}  // namespace drsyn
