#include "drsyn/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "drsyn/error.hpp"
#include "drsyn/parallel.hpp"

namespace drsyn {

ImdpAbstraction::ImdpAbstraction(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), rows_(num_states * num_actions) {}

namespace {

const IntervalEntry* find_entry(const ImdpAbstraction::Row& row, StateId q2) {
    auto it = std::lower_bound(row.begin(), row.end(), q2, [](const IntervalEntry& e, StateId d) { return e.dest < d; });
    return it != row.end() && it->dest == q2 ? &*it : nullptr;
}

// Visits every cell index in the inclusive coordinate box [first, last].
template <class Fn>
void for_each_cell(const Partition& p, const std::vector<int>& first, const std::vector<int>& last, Fn&& fn) {
    std::vector<int> c = first;
    while (true) {
        fn(p.index(c));
        std::size_t i = 0;
        for (; i < p.dim(); ++i) {
            if (++c[i] <= last[i]) break;
            c[i] = first[i];
        }
        if (i == p.dim()) return;
    }
}

}  // namespace

double ImdpAbstraction::lower(StateId q, std::size_t a, StateId q2) const {
    const auto* e = find_entry(row(q, a), q2);
    return e ? e->lower : 0.0;
}

double ImdpAbstraction::upper(StateId q, std::size_t a, StateId q2) const {
    const auto* e = find_entry(row(q, a), q2);
    return e ? e->upper : 0.0;
}

std::size_t ImdpAbstraction::nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
}

ImdpAbstraction build_imdp(const SystemModel& m, const Partition& p, const DiscreteDistribution& center) {
    m.validate();
    if (m.state_dim != p.dim()) throw InvalidInput("build_imdp: system and partition dimensions differ");
    if (center.atoms.dim() != m.noise_dim) throw InvalidInput("build_imdp: center atoms have the wrong dimension");
    for (std::size_t i = 0; i < center.size(); ++i)
        if (!m.noise_support.contains(center.atoms.row(i)))
            throw InvalidInput("build_imdp: center atom " + std::to_string(i) + " lies outside W");

    const std::size_t num_actions = m.num_modes();
    ImdpAbstraction imdp(p.num_states(), num_actions);
    const Box& domain = p.domain();

    parallel_for(p.num_cells() * num_actions, [&](std::size_t idx) {
        const StateId q = idx / num_actions;
        const std::size_t a = idx % num_actions;
        const Box cell = p.cell(q);
        std::map<StateId, std::pair<double, double>> acc;
        std::vector<int> first, last;
        for (std::size_t i = 0; i < center.size(); ++i) {
            const double u = center.weights[i];
            if (u <= 0.0) continue;
            const Box reach = m.reach_fn(cell, a, Box::point(center.atoms.row(i))).inflated(kReachSlack);
            if (p.overlapping_range(reach, first, last)) {
                const bool single = first == last;
                for_each_cell(p, first, last, [&](StateId c) { acc[c].second += u; });
                if (single) {
                    bool inside = true;
                    for (std::size_t k = 0; k < p.dim() && inside; ++k)
                        inside = reach.lower[k] >= p.grid_line(k, first[k]) && reach.upper[k] <= p.grid_line(k, first[k] + 1);
                    if (inside) acc[p.index(first)].first += u;
                }
            }
            if (!domain.contains(reach)) acc[p.unsafe_id()].second += u;
            if (!domain.intersects(reach)) acc[p.unsafe_id()].first += u;
        }
        auto& row = imdp.row(q, a);
        row.reserve(acc.size());
        for (const auto& [dest, bounds] : acc)
            row.push_back(IntervalEntry{dest, std::min(bounds.first, 1.0), std::min(bounds.second, 1.0)});
    });

    for (std::size_t a = 0; a < num_actions; ++a) imdp.row(p.unsafe_id(), a) = {IntervalEntry{p.unsafe_id(), 1.0, 1.0}};
    return imdp;
}

std::vector<IntervalViolation> validate_interval_structure(const ImdpAbstraction& imdp, StateId unsafe) {
    constexpr double tol = 1e-9;
    std::vector<IntervalViolation> out;
    for (StateId q = 0; q < imdp.num_states(); ++q) {
        for (std::size_t a = 0; a < imdp.num_actions(); ++a) {
            const auto& row = imdp.row(q, a);
            double lo_sum = 0.0, hi_sum = 0.0;
            for (const auto& e : row) {
                if (!(e.lower >= 0.0 && e.lower <= e.upper && e.upper <= 1.0)) {
                    std::ostringstream os;
                    os << "entry (" << q << ", " << a << ", " << e.dest << ") violates 0 <= lower <= upper <= 1";
                    out.push_back({q, a, e.dest, os.str()});
                }
                lo_sum += e.lower;
                hi_sum += e.upper;
            }
            if (lo_sum > 1.0 + tol || hi_sum < 1.0 - tol) {
                std::ostringstream os;
                os << "row (" << q << ", " << a << ") has sum(lower) = " << lo_sum << ", sum(upper) = " << hi_sum;
                out.push_back({q, a, q, os.str()});
            }
            if (q == unsafe && (row.size() != 1 || row[0].dest != unsafe || row[0].lower != 1.0 || row[0].upper != 1.0)) {
                std::ostringstream os;
                os << "unsafe state is not absorbing under action " << a;
                out.push_back({q, a, q, os.str()});
            }
        }
    }
    return out;
}

RmdpAbstraction build_rmdp(ImdpAbstraction imdp, const SystemModel& m, const Partition& p, const AmbiguityBall& ball) {
    if (ball.radius < 0.0) throw InvalidInput("build_rmdp: negative ambiguity radius");
    if (ball.order < 1) throw InvalidInput("build_rmdp: order s must be >= 1");
    if (imdp.num_states() != p.num_states() || imdp.num_actions() != m.num_modes())
        throw InvalidInput("build_rmdp: abstraction does not match the partition / system");
    RmdpAbstraction r;
    r.partition = p;
    r.norm = ball.norm;
    r.order = ball.order;
    r.radius = ball.radius;
    const std::size_t num_actions = m.num_modes();
    r.theta.assign(p.num_states() * num_actions, 0.0);
    r.restricted.assign(p.num_states() * num_actions, {});

    parallel_for(p.num_cells() * num_actions, [&](std::size_t idx) {
        const StateId q = idx / num_actions;
        const std::size_t a = idx % num_actions;
        const Box cell = p.cell(q);
        const double lw = m.lipschitz_fn(cell, a, ball.norm);
        r.theta[idx] = std::pow(lw * ball.radius, ball.order);

        const Box reach = m.reach_fn(cell, a, m.noise_support).inflated(kReachSlack);
        std::vector<StateId> dests;
        std::vector<int> first, last;
        if (p.overlapping_range(reach, first, last))
            for_each_cell(p, first, last, [&](StateId c) { dests.push_back(c); });
        if (!p.domain().contains(reach)) dests.push_back(p.unsafe_id());
        for (const auto& e : imdp.row(q, a)) dests.push_back(e.dest);
        std::sort(dests.begin(), dests.end());
        dests.erase(std::unique(dests.begin(), dests.end()), dests.end());
        r.restricted[idx] = std::move(dests);
    });
    for (std::size_t a = 0; a < num_actions; ++a) r.restricted[p.unsafe_id() * num_actions + a] = {p.unsafe_id()};
    r.imdp = std::move(imdp);
    return r;
}

AbstractionStats abstraction_stats(const RmdpAbstraction& rmdp) {
    AbstractionStats s;
    s.nonzeros = rmdp.imdp.nonzeros();
    const double rows = static_cast<double>(rmdp.num_states() * rmdp.num_actions());
    std::size_t restricted = 0;
    for (const auto& d : rmdp.restricted) restricted += d.size();
    s.average_support = rows > 0 ? static_cast<double>(s.nonzeros) / rows : 0.0;
    s.average_restricted_support = rows > 0 ? static_cast<double>(restricted) / rows : 0.0;
    return s;
}

}  // namespace drsyn
