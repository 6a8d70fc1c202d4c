#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "drsyn/dynamics.hpp"
#include "drsyn/product.hpp"

namespace drsyn {

/// Continuous-state switching controller: the abstract strategy composed with
/// the region map, carrying the DFA state as memory. References the product
/// and strategy, which must outlive it.
class Controller {
public:
    Controller(const ProductRmdp& prod, const Strategy& strategy);

    /// Resets the memory to delta(z0, L(J(x0))).
    void start(std::span<const double> x0);
    /// Advances the memory with the label of the region of x_next.
    void observe(std::span<const double> x_next);
    /// Action for the current state x. Throws Error once the state is unsafe
    /// or before start().
    std::size_t action(std::span<const double> x) const;

    ltlf::DfaState memory() const { return z_; }
    StateId region() const { return q_; }
    bool accepted() const;
    bool in_unsafe() const;

private:
    const ProductRmdp* prod_;
    const Strategy* strategy_;
    StateId q_ = 0;
    ltlf::DfaState z_ = 0;
    bool started_ = false;
};

/// sigma_x(x) = sigma*(J(x), z).
std::size_t control_step(const Controller& ctrl, std::span<const double> x);

struct Trajectory {
    std::vector<Vec> states;
    std::vector<std::size_t> actions;   // one fewer than states
    std::vector<StateId> regions;       // per state
    std::vector<ltlf::DfaState> memory; // per state, after reading its label
    bool satisfied = false;
    bool exited = false;
};

/// Closed-loop run from x0 (which must lie in the domain). Stops on DFA
/// acceptance, on leaving the domain (unsatisfied), or after `horizon` steps.
Trajectory simulate_trajectory(const SystemModel& m, Controller& ctrl, const GroundTruthNoise& noise,
                               std::span<const double> x0, std::size_t horizon, std::mt19937_64& rng);

struct McReport {
    StateId cell = 0;
    std::size_t trials = 0;
    std::size_t horizon = 0;
    std::size_t successes = 0;
    double empirical_rate = 0.0;
    /// Two-sided exact (Clopper-Pearson) 99% interval around the rate.
    double ci_lower = 0.0;
    double ci_upper = 1.0;
    double p_lower = 0.0;
    double p_upper = 1.0;
    bool contained = false;
    /// Runs neither accepted nor exited at the horizon.
    double live_fraction = 0.0;
};

inline constexpr double kMcConfidence = 0.99;

/// Exact binomial interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence = kMcConfidence);

/// Trial t uses the generator seeded with splitmix64(seed ^ t); x0 is uniform
/// in cell q0. Containment: the binomial interval meets [p_lower, p_upper] of
/// the product state entered from q0.
McReport monte_carlo(const SystemModel& m, const ProductRmdp& prod, const Strategy& strategy, const ValueBounds& bounds,
                     const GroundTruthNoise& noise, StateId q0, std::size_t trials, std::size_t horizon,
                     std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace drsyn
