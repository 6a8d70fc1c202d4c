#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../oracles/transport.hpp"
#include "drsyn/ambiguity.hpp"
#include "drsyn/error.hpp"

using namespace drsyn;

namespace {

SampleSet samples_1d(std::vector<double> xs, double lo, double hi) {
    return SampleSet(PointSet(1, std::move(xs)), Box({lo}, {hi}));
}

double weight_sum(const DiscreteDistribution& d) {
    double s = 0.0;
    for (double w : d.weights) s += w;
    return s;
}

}  // namespace

TEST_CASE("sample set rejects points outside the support") {
    CHECK_THROWS_AS(samples_1d({0.5, 1.5}, 0, 1), InvalidInput);
    CHECK_THROWS_AS(SampleSet(PointSet(2, {0.1, 0.2}), Box({0}, {1})), InvalidInput);
    CHECK_NOTHROW(samples_1d({0.0, 1.0}, 0, 1));
}

TEST_CASE("empirical distribution") {
    auto one = empirical_distribution(samples_1d({0.5}, 0, 1));
    REQUIRE(one.size() == 1);
    CHECK(one.weights[0] == 1.0);

    auto merged = empirical_distribution(samples_1d({0, 1, 1}, 0, 1));
    REQUIRE(merged.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const double expect = merged.atoms.row(i)[0] == 0.0 ? 1.0 / 3.0 : 2.0 / 3.0;
        CHECK(merged.weights[i] == doctest::Approx(expect).epsilon(1e-15));
    }

    auto four = empirical_distribution(
        SampleSet(PointSet(2, {0, 0, 1, 0, 0, 1, 1, 1}), Box({0, 0}, {1, 1})));
    REQUIRE(four.size() == 4);
    for (double w : four.weights) CHECK(w == 0.25);
    CHECK_NOTHROW(four.validate());
}

TEST_CASE("distribution validation") {
    DiscreteDistribution d;
    d.atoms = PointSet(1, {0.0, 1.0});
    d.weights = {0.5, 0.6};
    CHECK_THROWS_AS(d.validate(), InvalidInput);
    d.weights = {1.1, -0.1};
    CHECK_THROWS_AS(d.validate(), InvalidInput);
    d.weights = {0.25, 0.75};
    CHECK_NOTHROW(d.validate());
}

TEST_CASE("concentration tail") {
    CHECK(concentration_tail(8, std::exp(-4.0), 1.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(concentration_tail(2, std::exp(-1.0), 1.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    const double hand = 0.2 * std::sqrt(2.0 * std::log(1e9) / 1e4);
    CHECK(concentration_tail(10000, 1e-9, 0.2, 1) == doctest::Approx(hand).epsilon(1e-14));
    CHECK(concentration_tail(10000, 1e-9, 0.2, 1) == doctest::Approx(0.0129).epsilon(1e-3));
    CHECK_THROWS_AS(concentration_tail(10, 0.0, 1.0, 1), InvalidInput);
    CHECK_THROWS_AS(concentration_tail(10, 1.0, 1.0, 1), InvalidInput);
}

TEST_CASE("mean transport bound") {
    CHECK(mean_transport_bound(4, 1.0, 1, 1, Norm::Inf) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean_transport_bound(1000, 1.0, 3, 1, Norm::Inf) == doctest::Approx(0.3464).epsilon(1e-4));
    CHECK(mean_transport_bound(1000000, 1.0, 2, 1, Norm::Inf) < mean_transport_bound(10000, 1.0, 2, 1, Norm::Inf));
    CHECK(mean_transport_bound(16, 1.0, 2, 1, Norm::Inf) ==
          doctest::Approx(2.0 * std::sqrt(2.0) * 0.25 * std::log2(18.0)).epsilon(1e-14));
    CHECK_THROWS_AS(mean_transport_bound(10, 1.0, 1, 2, Norm::Inf), InvalidInput);
    CHECK_THROWS_AS(mean_transport_bound(10, 1.0, 1, 1, Norm::Two), InvalidInput);
}

TEST_CASE("radius") {
    const double beta = std::exp(-4.0);
    CHECK(radius(8, beta, 1.0, 1, 1, Norm::Inf, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(radius(8, beta, 1.0, 1, 1, Norm::Inf, 0.25) == doctest::Approx(1.25).epsilon(1e-14));
    // Without override the transport term is added.
    CHECK(radius(4, beta, 1.0, 1, 1, Norm::Inf) ==
          doctest::Approx(1.0 + concentration_tail(4, beta, 1.0, 1)).epsilon(1e-14));
    // s = 2 requires an override and takes its square root.
    CHECK(radius(8, beta, 1.0, 1, 2, Norm::Inf, 0.25) ==
          doctest::Approx(0.5 + concentration_tail(8, beta, 1.0, 2)).epsilon(1e-14));
    CHECK_THROWS_AS(radius(8, beta, 1.0, 1, 1, Norm::Inf, -0.1), InvalidInput);
}

TEST_CASE("radius dominates the tail and is monotone") {
    for (std::size_t d : {1u, 2u, 3u})
        for (std::size_t n = 10; n < 200000; n = n * 3 / 2 + 1) {
            const double e = radius(n, 1e-6, 0.7, d, 1, Norm::Inf);
            CHECK(e >= concentration_tail(n, 1e-6, 0.7, 1));
            CHECK(radius(n + 1, 1e-6, 0.7, d, 1, Norm::Inf) < e);
            CHECK(radius(n, 1e-7, 0.7, d, 1, Norm::Inf) > e);
        }
}

TEST_CASE("support diameter") {
    auto mk = [](Vec lo, Vec hi) {
        return SampleSet(PointSet(lo.size(), lo), Box(lo, hi));
    };
    CHECK(support_diameter(mk({0, 0}, {1, 1})) == 1.0);
    CHECK(support_diameter(mk({-1, 0}, {2, 1})) == 3.0);
    CHECK(support_diameter(mk({0, 0, 0}, {0.4, 0.4, 0.4})) == doctest::Approx(0.4));
}

TEST_CASE("cluster examples") {
    auto exact = cluster(samples_1d({0, 0, 1, 1}, 0, 1), 2, 1);
    REQUIRE(exact.center.size() == 2);
    CHECK(exact.inflation == 0.0);
    for (double w : exact.center.weights) CHECK(w == 0.5);

    auto three = cluster(samples_1d({0, 0.2, 1.0}, 0, 1), 2, 1);
    REQUIRE(three.center.size() == 2);
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i < 2; ++i) atoms.emplace_back(three.center.atoms.row(i)[0], three.center.weights[i]);
    std::sort(atoms.begin(), atoms.end());
    CHECK(atoms[0].first == doctest::Approx(0.1));
    CHECK(atoms[1].first == doctest::Approx(1.0));
    CHECK(atoms[0].second == doctest::Approx(2.0 / 3.0));
    CHECK(three.inflation == doctest::Approx(0.2 / 3.0));

    auto full = cluster(samples_1d({0.1, 0.4, 0.9}, 0, 1), 3, 9);
    CHECK(full.inflation == 0.0);
    CHECK(full.center.size() == 3);

    CHECK_THROWS_AS(cluster(samples_1d({0.1, 0.4}, 0, 1), 3, 1), InvalidInput);
    CHECK_THROWS_AS(cluster(samples_1d({0.1, 0.4}, 0, 1), 0, 1), InvalidInput);
}

TEST_CASE("cluster is deterministic and weights sum to one") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    PointSet pts(2);
    for (int i = 0; i < 300; ++i) pts.push_back(std::vector<double>{u(rng), u(rng)});
    SampleSet ss(pts, Box({-1, -1}, {1, 1}));
    for (Norm l : {Norm::One, Norm::Two, Norm::Inf}) {
        auto a = cluster(ss, 12, 42, l);
        auto b = cluster(ss, 12, 42, l);
        CHECK(a.center.atoms.data() == b.center.atoms.data());
        CHECK(a.center.weights == b.center.weights);
        CHECK(a.inflation == b.inflation);
        CHECK(weight_sum(a.center) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.inflation > 0.0);
    }
}

TEST_CASE("cluster inflation bounds the exact Wasserstein distance") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + trial % 5, d = 1 + trial % 2;
        const int s = 1 + (trial / 5) % 2;
        const Norm l = trial % 3 == 0 ? Norm::Two : (trial % 3 == 1 ? Norm::One : Norm::Inf);
        std::uniform_real_distribution<double> u(0, 1);
        PointSet pts(d);
        for (std::size_t i = 0; i < n; ++i) {
            Vec x(d);
            for (auto& v : x) v = u(rng);
            pts.push_back(x);
        }
        SampleSet ss(pts, Box(Vec(d, 0.0), Vec(d, 1.0)));
        const std::size_t k = 1 + trial % (n - 1);
        auto res = cluster(ss, k, trial, l, s);
        std::vector<std::size_t> expanded;
        for (std::size_t c = 0; c < res.center.size(); ++c) {
            const auto copies = static_cast<std::size_t>(std::lround(res.center.weights[c] * n));
            for (std::size_t r = 0; r < copies; ++r) expanded.push_back(c);
        }
        REQUIRE(expanded.size() == n);
        const double ws = oracle::assignment_cost(n, [&](std::size_t i, std::size_t j) {
            Vec diff(d);
            for (std::size_t a = 0; a < d; ++a) diff[a] = pts.row(i)[a] - res.center.atoms.row(expanded[j])[a];
            return std::pow(norm_of(diff, l), s);
        });
        CHECK(res.inflation >= std::pow(ws, 1.0 / s) - 1e-12);
    }
}
