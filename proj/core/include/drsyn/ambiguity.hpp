#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "drsyn/geometry.hpp"

namespace drsyn {

/// Row-major N x d matrix of points.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t dim, std::vector<double> data);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const { return data_.empty(); }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    void push_back(std::span<const double> x);
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// i.i.d. noise samples together with the declared support W.
struct SampleSet {
    PointSet samples;
    Box support;

    SampleSet() = default;
    /// Throws InvalidInput when a sample leaves the support or shapes disagree.
    SampleSet(PointSet samples, Box support);
    std::size_t size() const { return samples.size(); }
    std::size_t dim() const { return samples.dim(); }
};

/// Finitely supported probability distribution.
struct DiscreteDistribution {
    PointSet atoms;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    /// Throws InvalidInput unless weights are nonnegative and sum to one within 1e-12.
    void validate() const;
};

/// Wasserstein ball {P : W_s(P, center) <= radius} with l-norm ground cost.
struct AmbiguityBall {
    DiscreteDistribution center;
    double radius = 0.0;
    int order = 1;
    Norm norm = Norm::Inf;
    double beta = 1e-9;
};

/// Uniform weights over the samples; identical samples are merged.
DiscreteDistribution empirical_distribution(const SampleSet& ss);

/// phi * (2 ln(1/beta))^(1/(2s)) * N^(-1/(2s)).
double concentration_tail(std::size_t n, double beta, double phi, int s);

/// Default constant multiplying the mean transport rate.
inline constexpr double kDefaultTransportConstant = 2.0;

/// Upper bound g(N, phi, d, s, l) on the expected transport cost between the
/// true law and the empirical distribution. Only s = 1 with the inf-norm is
/// built in:
///   g = C * phi * sqrt(d) * r(N, d),
///   r = N^-1/2 (d = 1), N^-1/2 log2(2 + N) (d = 2), N^-1/d (d >= 3).
/// Other regimes throw InvalidInput; pass an override to radius() instead.
double mean_transport_bound(std::size_t n, double phi, std::size_t d, int s, Norm l,
                            double constant = kDefaultTransportConstant);

/// Ambiguity radius eps(N, beta) = g^(1/s) + sqrt(d) * concentration_tail(N, beta, phi, s).
double radius(std::size_t n, double beta, double phi, std::size_t d, int s, Norm l,
              std::optional<double> g_override = std::nullopt, double constant = kDefaultTransportConstant);

/// Infinity-norm diameter of the declared support box.
double support_diameter(const SampleSet& ss);

struct ClusterResult {
    DiscreteDistribution center;
    /// Upper bound on W_s(empirical, center) from the assignment coupling.
    double inflation = 0.0;
    int iterations = 0;
};

/// Compresses the empirical distribution to at most k atoms. Lloyd iterations
/// with k-means++ seeding; centroids are means for l = 2 and coordinate-wise
/// medians otherwise. Throws InvalidInput for k outside [1, N].
ClusterResult cluster(const SampleSet& ss, std::size_t k, std::uint64_t seed, Norm l = Norm::Inf, int s = 1);

}  // namespace drsyn
