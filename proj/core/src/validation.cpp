#include "drsyn/validation.hpp"

#include <boost/math/special_functions/beta.hpp>

#include "drsyn/error.hpp"
#include "drsyn/parallel.hpp"

namespace drsyn {

Controller::Controller(const ProductRmdp& prod, const Strategy& strategy) : prod_(&prod), strategy_(&strategy) {
    if (strategy.action.size() != prod.num_states()) throw InvalidInput("Controller: strategy does not match the product");
}

void Controller::start(std::span<const double> x0) {
    q_ = prod_->base().partition.locate(x0);
    z_ = prod_->successor_z(prod_->dfa().initial, q_);
    started_ = true;
}

void Controller::observe(std::span<const double> x_next) {
    if (!started_) throw Error("Controller: observe before start");
    q_ = prod_->base().partition.locate(x_next);
    z_ = prod_->successor_z(z_, q_);
}

std::size_t Controller::action(std::span<const double> x) const {
    if (!started_) throw Error("Controller: queried before start");
    const StateId q = prod_->base().partition.locate(x);
    if (prod_->base().partition.is_unsafe(q)) throw Error("Controller: state has left the safe set");
    return strategy_->action[prod_->index(q, z_)];
}

bool Controller::accepted() const { return started_ && !in_unsafe() && prod_->dfa().accepting[z_]; }

bool Controller::in_unsafe() const { return prod_->base().partition.is_unsafe(q_); }

std::size_t control_step(const Controller& ctrl, std::span<const double> x) { return ctrl.action(x); }

Trajectory simulate_trajectory(const SystemModel& m, Controller& ctrl, const GroundTruthNoise& noise,
                               std::span<const double> x0, std::size_t horizon, std::mt19937_64& rng) {
    if (horizon == 0) throw InvalidInput("simulate_trajectory: horizon must be positive");
    Trajectory t;
    ctrl.start(x0);
    if (ctrl.in_unsafe()) throw InvalidInput("simulate_trajectory: initial state outside the domain");
    Vec x(x0.begin(), x0.end());
    auto record = [&] {
        t.states.push_back(x);
        t.regions.push_back(ctrl.region());
        t.memory.push_back(ctrl.memory());
    };
    record();
    if (ctrl.accepted()) {
        t.satisfied = true;
        return t;
    }
    for (std::size_t k = 0; k < horizon; ++k) {
        const std::size_t a = ctrl.action(x);
        const Vec w = noise.sample(rng);
        x = m.step_fn(x, a, w);
        ctrl.observe(x);
        t.actions.push_back(a);
        record();
        if (ctrl.in_unsafe()) {
            t.exited = true;
            return t;
        }
        if (ctrl.accepted()) {
            t.satisfied = true;
            return t;
        }
    }
    return t;
}

std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence) {
    if (n == 0 || k > n) throw InvalidInput("clopper_pearson: need 0 <= k <= n, n >= 1");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidInput("clopper_pearson: confidence outside (0, 1)");
    const double alpha = 1.0 - confidence;
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2.0);
    const double hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
    return {lo, hi};
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

McReport monte_carlo(const SystemModel& m, const ProductRmdp& prod, const Strategy& strategy, const ValueBounds& bounds,
                     const GroundTruthNoise& noise, StateId q0, std::size_t trials, std::size_t horizon,
                     std::uint64_t seed) {
    const Partition& p = prod.base().partition;
    if (trials == 0) throw InvalidInput("monte_carlo: trials must be positive");
    if (q0 >= p.num_cells()) throw InvalidInput("monte_carlo: start cell must be a safe cell");
    const Box cell = p.cell(q0);

    std::vector<char> success(trials, 0), live(trials, 0);
    parallel_for(trials, [&](std::size_t t) {
        std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(t)));
        Vec x0(p.dim());
        for (std::size_t i = 0; i < p.dim(); ++i)
            x0[i] = std::uniform_real_distribution<double>(cell.lower[i], cell.upper[i])(rng);
        // Sampling at the open upper face can land in the neighbour; keep x0 in q0.
        if (p.locate(x0) != q0) x0 = cell.center();
        Controller ctrl(prod, strategy);
        const Trajectory tr = simulate_trajectory(m, ctrl, noise, x0, horizon, rng);
        success[t] = tr.satisfied;
        live[t] = !tr.satisfied && !tr.exited;
    });

    McReport r;
    r.cell = q0;
    r.trials = trials;
    r.horizon = horizon;
    for (std::size_t t = 0; t < trials; ++t) {
        r.successes += success[t] ? 1 : 0;
        r.live_fraction += live[t] ? 1.0 : 0.0;
    }
    r.live_fraction /= static_cast<double>(trials);
    r.empirical_rate = static_cast<double>(r.successes) / static_cast<double>(trials);
    std::tie(r.ci_lower, r.ci_upper) = clopper_pearson(r.successes, trials);
    const std::size_t s0 = prod.initial_state(q0);
    r.p_lower = bounds.p_lower.at(s0);
    r.p_upper = bounds.p_upper.at(s0);
    r.contained = r.ci_upper >= r.p_lower && r.ci_lower <= r.p_upper;
    return r;
}

}  // namespace drsyn
