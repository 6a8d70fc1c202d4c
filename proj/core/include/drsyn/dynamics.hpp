#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "drsyn/ambiguity.hpp"
#include "drsyn/geometry.hpp"
#include "drsyn/interval.hpp"

namespace drsyn {

/// Switched stochastic system x' = f_a(x, w) with finitely many modes a.
///
/// The four callbacks are the whole contract: `step` evaluates the vector
/// field, `reach` returns a box containing { f_a(x, w) : x in cell, w in noise }
/// (a point noise is a degenerate box), `lipschitz` bounds the Lipschitz
/// constant in w over a cell for the given norm, and `inverse` (optional)
/// recovers w from a transition when f_a(x, .) is injective.
struct SystemModel {
    using StepFn = std::function<Vec(std::span<const double> x, std::size_t a, std::span<const double> w)>;
    using ReachFn = std::function<Box(const Box& cell, std::size_t a, const Box& noise)>;
    using LipschitzFn = std::function<double(const Box& cell, std::size_t a, Norm l)>;
    using InverseFn =
        std::function<std::optional<Vec>(std::span<const double> x, std::size_t a, std::span<const double> x_next)>;

    std::string name;
    std::size_t state_dim = 0;
    std::size_t noise_dim = 0;
    std::vector<std::string> modes;
    Box noise_support;
    StepFn step_fn;
    ReachFn reach_fn;
    LipschitzFn lipschitz_fn;
    InverseFn inverse_fn;

    std::size_t num_modes() const { return modes.size(); }
    /// Throws InvalidInput when a required callback is missing or shapes disagree.
    void validate() const;
};

/// Interval evaluators from which reach and Lipschitz callbacks are derived.
struct IntervalExtension {
    /// Natural interval extension of f_a over boxes of states and noises.
    std::function<IntervalVec(const IntervalVec& x, std::size_t a, const IntervalVec& w)> eval;
    /// Interval enclosures of the Jacobians d f / d x (n x n) and d f / d w (n x d).
    std::function<IntervalMatrix(const IntervalVec& x, std::size_t a, const IntervalVec& w)> jac_x;
    std::function<IntervalMatrix(const IntervalVec& x, std::size_t a, const IntervalVec& w)> jac_w;
};

/// Image box of (cell x noise) under f_a. For each output coordinate whose
/// partial derivatives all have a certified sign, the bound is attained at
/// two corners and evaluated exactly; other coordinates fall back to the
/// natural interval extension.
Box monotone_reach(const SystemModel::StepFn& step, const IntervalExtension& ext, const Box& cell, std::size_t a,
                   const Box& noise);

/// Induced-norm bound of the interval Jacobian in w: max row sum (inf),
/// max column sum (1), Frobenius norm (2).
double jacobian_norm_bound(const IntervalMatrix& jac_w, Norm l);

/// Fills reach_fn and lipschitz_fn of `m` from an interval extension.
void attach_interval_extension(SystemModel& m, IntervalExtension ext);

// Operations ----------------------------------------------------------------

/// Throws InvalidInput for an unknown mode or a noise outside the support.
Vec step(const SystemModel& m, std::span<const double> x, std::size_t a, std::span<const double> w);
Box reach_over_approx(const SystemModel& m, const Box& cell, std::size_t a, std::span<const double> w);
Box reach_over_approx(const SystemModel& m, const Box& cell, std::size_t a, const Box& noise);
double lipschitz_cell_bound(const SystemModel& m, const Box& cell, std::size_t a, Norm l = Norm::Inf);
/// The unique w with f_a(x, w) = x_next. Throws InvalidInput when the model
/// declares no inverse, the inverse does not exist at x, the recovered noise
/// leaves W, or the round trip misses x_next by more than 1e-9.
Vec extract_noise(const SystemModel& m, std::span<const double> x, std::size_t a, std::span<const double> x_next);

// Benchmark presets -----------------------------------------------------------

/// x' = x + u_a + gain * w.
struct AdditiveParams {
    std::size_t dim = 1;
    std::vector<Vec> inputs{{0.0}, {-0.2}, {0.2}};
    double gain = 1.0;
    Box noise{{-0.05}, {0.05}};
};

/// x' = x .* w + u_a (elementwise), noise dimension equals state dimension.
struct MultiplicativeParams {
    std::size_t dim = 1;
    std::vector<Vec> inputs{{0.0}, {0.1}, {-0.1}};
    Box noise{{0.8}, {1.0}};
};

/// Damped pendulum under wind with explicit Euler step:
///   theta'     = theta + T omega
///   omega'     = omega + T ( -(g/len) sin theta + u_a / (m len^2) - drag/(m len^2) * v |v| )
///   v          = omega - w cos theta
struct PendulumParams {
    double mass = 1.0;
    double length = 1.0;
    double gravity = 9.81;
    double drag = 0.5;
    double dt = 0.1;
    std::vector<double> torques{-2.0, -1.0, 0.0, 1.0, 2.0};
    Box noise{{-1.0}, {1.0}};
};

/// Planar unicycle at constant speed with one mode per heading and additive noise:
///   x' = x + T v cos(h_a) + w1,  y' = y + T v sin(h_a) + w2,  h_a = 2 pi a / headings.
struct Unicycle2dParams {
    double speed = 1.0;
    double dt = 0.1;
    int headings = 8;
    Box noise{{-0.05, -0.05}, {0.05, 0.05}};
};

/// Kinematic car (x, y, heading) whose linear speed is perturbed by friction noise:
///   x' = x + T (v_a + w) cos h,  y' = y + T (v_a + w) sin h,  h' = h + T omega_a.
struct Unicycle3dParams {
    double dt = 0.1;
    std::vector<double> speeds{0.5, 1.0};
    std::vector<double> turn_rates{-1.0, -0.5, 0.0, 0.5, 1.0};
    Box noise{{-0.1}, {0.0}};
};

SystemModel make_additive(const AdditiveParams& p = {});
SystemModel make_multiplicative(const MultiplicativeParams& p = {});
SystemModel make_pendulum(const PendulumParams& p = {});
SystemModel make_unicycle_2d(const Unicycle2dParams& p = {});
SystemModel make_unicycle_3d(const Unicycle3dParams& p = {});

/// Builds a preset by name ("additive", "multiplicative", "pendulum",
/// "unicycle-2d", "unicycle-3d") from a JSON parameter object; missing
/// fields keep their defaults.
SystemModel make_preset(const std::string& name, const nlohmann::json& params);

// Ground-truth noise -----------------------------------------------------------

/// Simulable stand-in for the unknown noise law; every draw lies in the support.
class GroundTruthNoise {
public:
    enum class Kind { Uniform, TruncatedGaussian, Mixture };
    struct Component {
        Vec mean;
        Vec stddev;
        double weight = 1.0;
    };

    static GroundTruthNoise uniform(Box support, std::uint64_t seed = 0);
    static GroundTruthNoise truncated_gaussian(Box support, Vec mean, Vec stddev, std::uint64_t seed = 0);
    static GroundTruthNoise mixture(Box support, std::vector<Component> components, std::uint64_t seed = 0);
    /// {"kind": "uniform" | "truncated-gaussian" | "mixture", ...}
    static GroundTruthNoise from_json(const nlohmann::json& j, Box support);

    Kind kind() const { return kind_; }
    const Box& support() const { return support_; }
    std::uint64_t seed() const { return seed_; }

    Vec sample(std::mt19937_64& rng) const;
    /// N draws from a generator seeded with seed().
    SampleSet draw(std::size_t n) const;

private:
    Kind kind_ = Kind::Uniform;
    Box support_;
    std::vector<Component> components_;
    std::uint64_t seed_ = 0;
};

}  // namespace drsyn
