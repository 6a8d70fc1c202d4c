#include <nlohmann/json.hpp>

#include "drsyn/dynamics.hpp"
#include "drsyn/error.hpp"

namespace drsyn {

namespace {

constexpr int kMaxRejections = 100000;

}  // namespace

GroundTruthNoise GroundTruthNoise::uniform(Box support, std::uint64_t seed) {
    GroundTruthNoise g;
    g.kind_ = Kind::Uniform;
    g.support_ = std::move(support);
    g.seed_ = seed;
    return g;
}

GroundTruthNoise GroundTruthNoise::truncated_gaussian(Box support, Vec mean, Vec stddev, std::uint64_t seed) {
    return mixture(std::move(support), {Component{std::move(mean), std::move(stddev), 1.0}}, seed);
}

GroundTruthNoise GroundTruthNoise::mixture(Box support, std::vector<Component> components, std::uint64_t seed) {
    if (components.empty()) throw InvalidInput("noise mixture needs at least one component");
    for (const auto& c : components) {
        if (c.mean.size() != support.dim() || c.stddev.size() != support.dim())
            throw InvalidInput("noise component dimension does not match the support");
        if (!(c.weight > 0.0)) throw InvalidInput("noise component weights must be positive");
        for (double s : c.stddev)
            if (!(s > 0.0)) throw InvalidInput("noise standard deviations must be positive");
    }
    GroundTruthNoise g;
    g.kind_ = components.size() == 1 ? Kind::TruncatedGaussian : Kind::Mixture;
    g.support_ = std::move(support);
    g.components_ = std::move(components);
    g.seed_ = seed;
    return g;
}

GroundTruthNoise GroundTruthNoise::from_json(const nlohmann::json& j, Box support) {
    const std::string kind = j.value("kind", std::string("uniform"));
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});
    if (kind == "uniform") return uniform(std::move(support), seed);
    if (kind == "truncated-gaussian")
        return truncated_gaussian(std::move(support), j.at("mean").get<Vec>(), j.at("stddev").get<Vec>(), seed);
    if (kind == "mixture") {
        std::vector<Component> comps;
        for (const auto& c : j.at("components"))
            comps.push_back(Component{c.at("mean").get<Vec>(), c.at("stddev").get<Vec>(), c.value("weight", 1.0)});
        return mixture(std::move(support), std::move(comps), seed);
    }
    throw InvalidInput("unknown noise kind '" + kind + "'");
}

Vec GroundTruthNoise::sample(std::mt19937_64& rng) const {
    const std::size_t d = support_.dim();
    Vec w(d);
    if (kind_ == Kind::Uniform) {
        for (std::size_t k = 0; k < d; ++k) {
            std::uniform_real_distribution<double> u(support_.lower[k], support_.upper[k]);
            w[k] = u(rng);
        }
        return w;
    }
    std::vector<double> weights;
    for (const auto& c : components_) weights.push_back(c.weight);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        const auto& c = components_[pick(rng)];
        for (std::size_t k = 0; k < d; ++k) w[k] = c.mean[k] + c.stddev[k] * normal(rng);
        if (support_.contains(w)) return w;
    }
    throw NumericalError("noise sampler: truncation rejected too many draws (support has negligible mass)");
}

SampleSet GroundTruthNoise::draw(std::size_t n) const {
    std::mt19937_64 rng(seed_);
    PointSet pts(support_.dim());
    for (std::size_t i = 0; i < n; ++i) pts.push_back(sample(rng));
    return SampleSet(std::move(pts), support_);
}

}  // namespace drsyn
