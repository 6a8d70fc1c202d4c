#include "drsyn/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "drsyn/error.hpp"

namespace drsyn {

PointSet::PointSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
    if (dim_ == 0) throw InvalidInput("point set dimension must be >= 1");
    if (data_.size() % dim_ != 0) throw InvalidInput("point set data is not a multiple of the dimension");
}

void PointSet::push_back(std::span<const double> x) {
    if (x.size() != dim_) throw InvalidInput("point dimension mismatch");
    data_.insert(data_.end(), x.begin(), x.end());
}

SampleSet::SampleSet(PointSet s, Box w) : samples(std::move(s)), support(std::move(w)) {
    if (samples.size() == 0) throw InvalidInput("sample set must contain at least one sample");
    if (samples.dim() != support.dim())
        throw InvalidInput("sample dimension does not match the support dimension");
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!support.contains(samples.row(i)))
            throw InvalidInput("sample " + std::to_string(i) + " lies outside the declared support");
}

void DiscreteDistribution::validate() const {
    if (weights.empty() || atoms.size() != weights.size())
        throw InvalidInput("distribution needs one weight per atom and at least one atom");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw InvalidInput("distribution weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("distribution weights must sum to one");
}

DiscreteDistribution empirical_distribution(const SampleSet& ss) {
    const std::size_t n = ss.size();
    std::map<std::vector<double>, std::size_t> seen;
    DiscreteDistribution out{PointSet(ss.dim()), {}};
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
        auto r = ss.samples.row(i);
        std::vector<double> key(r.begin(), r.end());
        auto [it, inserted] = seen.emplace(std::move(key), counts.size());
        if (inserted) {
            out.atoms.push_back(r);
            counts.push_back(0);
        }
        ++counts[it->second];
    }
    out.weights.reserve(counts.size());
    for (auto c : counts) out.weights.push_back(static_cast<double>(c) / static_cast<double>(n));
    return out;
}

double concentration_tail(std::size_t n, double beta, double phi, int s) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("confidence parameter beta must lie in (0, 1)");
    if (n < 1) throw InvalidInput("sample count must be >= 1");
    if (!(phi > 0.0)) throw InvalidInput("support diameter phi must be positive");
    if (s < 1) throw InvalidInput("order s must be >= 1");
    const double inv = 1.0 / (2.0 * s);
    return phi * std::pow(2.0 * std::log(1.0 / beta), inv) * std::pow(static_cast<double>(n), -inv);
}

double mean_transport_bound(std::size_t n, double phi, std::size_t d, int s, Norm l, double constant) {
    if (n < 1 || d < 1 || s < 1) throw InvalidInput("mean_transport_bound: N, d and s must be >= 1");
    if (s != 1 || l != Norm::Inf)
        throw InvalidInput("mean_transport_bound: unsupported regime (s=" + std::to_string(s) + ", l=" +
                           to_string(l) + "); supply an explicit transport bound override");
    const double nn = static_cast<double>(n);
    double rate = 0.0;
    if (d == 1)
        rate = 1.0 / std::sqrt(nn);
    else if (d == 2)
        rate = std::log2(2.0 + nn) / std::sqrt(nn);
    else
        rate = std::pow(nn, -1.0 / static_cast<double>(d));
    return constant * phi * std::sqrt(static_cast<double>(d)) * rate;
}

double radius(std::size_t n, double beta, double phi, std::size_t d, int s, Norm l, std::optional<double> g_override,
              double constant) {
    double g = 0.0;
    if (g_override) {
        if (!(*g_override >= 0.0)) throw InvalidInput("transport bound override must be nonnegative");
        g = *g_override;
    } else {
        g = mean_transport_bound(n, phi, d, s, l, constant);
    }
    return std::pow(g, 1.0 / s) + std::sqrt(static_cast<double>(d)) * concentration_tail(n, beta, phi, s);
}

double support_diameter(const SampleSet& ss) {
    double phi = 0.0;
    for (std::size_t i = 0; i < ss.support.dim(); ++i) phi = std::max(phi, ss.support.width(i));
    return phi;
}

// ---------------------------------------------------------------------------
// Clustering

namespace {

double distance(std::span<const double> a, std::span<const double> b, Norm l) {
    double buf[16];
    std::vector<double> heap;
    double* diff = buf;
    if (a.size() > 16) {
        heap.resize(a.size());
        diff = heap.data();
    }
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return norm_of(std::span<const double>(diff, a.size()), l);
}

std::size_t nearest(std::span<const double> x, const PointSet& centers, Norm l, double* dist_out) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = distance(x, centers.row(c), l);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

double median_of(std::vector<double>& v) {
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
    const double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
    return 0.5 * (lo + hi);
}

PointSet kmeanspp_seed(const PointSet& pts, std::size_t k, Norm l, std::mt19937_64& rng) {
    const std::size_t n = pts.size();
    PointSet centers(pts.dim());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    centers.push_back(pts.row(pick(rng)));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = distance(pts.row(i), centers.row(0), l);
        d2[i] = d * d;
    }
    while (centers.size() < k) {
        std::discrete_distribution<std::size_t> draw(d2.begin(), d2.end());
        const std::size_t c = draw(rng);
        centers.push_back(pts.row(c));
        for (std::size_t i = 0; i < n; ++i) {
            const double d = distance(pts.row(i), centers.row(centers.size() - 1), l);
            d2[i] = std::min(d2[i], d * d);
        }
    }
    return centers;
}

constexpr int kMaxIterations = 200;
constexpr double kShiftTol = 1e-10;
constexpr int kMaxReseeds = 10;

}  // namespace

ClusterResult cluster(const SampleSet& ss, std::size_t k, std::uint64_t seed, Norm l, int s) {
    const std::size_t n = ss.size();
    const std::size_t dim = ss.dim();
    if (k < 1 || k > n) throw InvalidInput("cluster: k must lie in [1, N]");
    if (s < 1) throw InvalidInput("cluster: order s must be >= 1");

    // Exact representation possible: no compression error.
    DiscreteDistribution empirical = empirical_distribution(ss);
    if (k >= empirical.size()) return ClusterResult{std::move(empirical), 0.0, 0};

    const PointSet& pts = ss.samples;
    std::mt19937_64 rng(seed);
    PointSet centers = kmeanspp_seed(pts, k, l, rng);
    std::vector<std::size_t> assign(n, 0);
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> counts(k, 0);
    int reseeds = 0;
    int iter = 0;

    auto assign_all = [&] {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = nearest(pts.row(i), centers, l, &dist[i]);
            ++counts[assign[i]];
        }
    };

    for (; iter < kMaxIterations; ++iter) {
        assign_all();
        // Empty cluster: move its center onto the worst-served sample.
        bool reseeded = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            if (++reseeds > kMaxReseeds) throw NumericalError("cluster: empty cluster persisted after 10 re-seeds");
            const std::size_t far =
                static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
            auto dst = centers.row(c);
            auto src = pts.row(far);
            std::copy(src.begin(), src.end(), dst.begin());
            dist[far] = 0.0;
            reseeded = true;
        }
        if (reseeded) {
            assign_all();
            if (std::find(counts.begin(), counts.end(), 0u) != counts.end()) continue;
        }

        PointSet updated(dim, std::vector<double>(k * dim, 0.0));
        if (l == Norm::Two) {
            for (std::size_t i = 0; i < n; ++i) {
                auto u = updated.row(assign[i]);
                auto x = pts.row(i);
                for (std::size_t j = 0; j < dim; ++j) u[j] += x[j];
            }
            for (std::size_t c = 0; c < k; ++c)
                for (double& v : updated.row(c)) v /= static_cast<double>(counts[c]);
        } else {
            std::vector<std::vector<double>> members(k);
            for (std::size_t j = 0; j < dim; ++j) {
                for (auto& m : members) m.clear();
                for (std::size_t i = 0; i < n; ++i) members[assign[i]].push_back(pts.row(i)[j]);
                for (std::size_t c = 0; c < k; ++c) updated.row(c)[j] = median_of(members[c]);
            }
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, distance(updated.row(c), centers.row(c), Norm::Inf));
        centers = std::move(updated);
        if (shift <= kShiftTol) {
            ++iter;
            break;
        }
    }

    // Final coupling: each sample moves to its nearest centroid.
    assign_all();
    ClusterResult out;
    out.iterations = iter;
    out.center.atoms = PointSet(dim);
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        out.center.atoms.push_back(centers.row(c));
        out.center.weights.push_back(static_cast<double>(counts[c]) / static_cast<double>(n));
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += std::pow(dist[i], s);
    out.inflation = std::pow(cost / static_cast<double>(n), 1.0 / s);
    return out;
}

}  // namespace drsyn
