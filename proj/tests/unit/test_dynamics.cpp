#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "drsyn/dynamics.hpp"
#include "drsyn/error.hpp"

using namespace drsyn;

namespace {

struct PresetCase {
    SystemModel model;
    Box domain;  // region cells are drawn from
};

std::vector<PresetCase> all_presets() {
    std::vector<PresetCase> out;
    AdditiveParams add;
    add.dim = 2;
    add.inputs = {{0.0, 0.0}, {0.1, -0.2}};
    add.gain = 1.5;
    add.noise = Box({-0.1, -0.05}, {0.1, 0.05});
    out.push_back({make_additive(), Box({0}, {2})});
    out.push_back({make_additive(add), Box({-1, -1}, {1, 1})});
    out.push_back({make_multiplicative(), Box({-2}, {2})});
    out.push_back({make_pendulum(), Box({-1.2, -2}, {1.2, 2})});
    out.push_back({make_unicycle_2d(), Box({0, 0}, {2, 2})});
    out.push_back({make_unicycle_3d(), Box({0, 0, -3.2}, {2, 2, 3.2})});
    return out;
}

Vec uniform_in(const Box& b, std::mt19937_64& rng) {
    Vec x(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) x[i] = std::uniform_real_distribution<double>(b.lower[i], b.upper[i])(rng);
    return x;
}

Box random_cell(const Box& domain, std::mt19937_64& rng) {
    Vec lo(domain.dim()), hi(domain.dim());
    for (std::size_t i = 0; i < domain.dim(); ++i) {
        double a = std::uniform_real_distribution<double>(domain.lower[i], domain.upper[i])(rng);
        double w = std::uniform_real_distribution<double>(0.0, 0.3 * domain.width(i))(rng);
        lo[i] = a;
        hi[i] = std::min(domain.upper[i], a + w);
    }
    return Box(lo, hi);
}

}  // namespace

TEST_CASE("step examples") {
    auto add = make_additive();
    CHECK(step(add, Vec{0.5}, 0, Vec{0.025})[0] == doctest::Approx(0.525));
    AdditiveParams wide;
    wide.noise = Box({-1}, {1});
    CHECK(step(make_additive(wide), Vec{0.5}, 0, Vec{0.25})[0] == doctest::Approx(0.75));

    auto pend = make_pendulum();
    REQUIRE(pend.modes.size() == 5);
    auto rest = step(pend, Vec{0, 0}, 2, Vec{0});
    CHECK(rest[0] == 0.0);
    CHECK(rest[1] == 0.0);

    auto uni = make_unicycle_2d();
    auto moved = step(uni, Vec{0.3, 0.7}, 0, Vec{0, 0});
    CHECK(moved[0] == doctest::Approx(0.4));
    CHECK(moved[1] == doctest::Approx(0.7));

    CHECK_THROWS_AS(step(add, Vec{0.5}, 7, Vec{0}), InvalidInput);
    CHECK_THROWS_AS(step(add, Vec{0.5}, 0, Vec{0.5}), InvalidInput);
}

TEST_CASE("reach examples") {
    AdditiveParams ap;
    ap.inputs = {{0.0}};
    ap.noise = Box({-1}, {1});
    auto add = make_additive(ap);
    auto r = reach_over_approx(add, Box({0}, {0.5}), 0, Vec{1.0});
    CHECK(r.lower[0] == doctest::Approx(1.0));
    CHECK(r.upper[0] == doctest::Approx(1.5));

    MultiplicativeParams mp;
    mp.inputs = {{0.0}};
    mp.noise = Box({0}, {1});
    auto mul = make_multiplicative(mp);
    auto rm = reach_over_approx(mul, Box({1}, {2}), 0, Vec{0.5});
    CHECK(rm.lower[0] == doctest::Approx(0.5));
    CHECK(rm.upper[0] == doctest::Approx(1.0));
}

TEST_CASE("lipschitz examples") {
    auto add = make_additive();
    CHECK(lipschitz_cell_bound(add, Box({0}, {1}), 0) == doctest::Approx(1.0));
    AdditiveParams g2;
    g2.gain = 2.0;
    CHECK(lipschitz_cell_bound(make_additive(g2), Box({3}, {4}), 1) == doctest::Approx(2.0));
    CHECK(lipschitz_cell_bound(make_multiplicative(), Box({1}, {2}), 0) == doctest::Approx(2.0));
}

TEST_CASE("extract noise examples") {
    AdditiveParams ap;
    ap.inputs = {{0.0}};
    ap.noise = Box({-1}, {1});
    CHECK(extract_noise(make_additive(ap), Vec{0.5}, 0, Vec{0.75})[0] == doctest::Approx(0.25));
    MultiplicativeParams mp;
    mp.inputs = {{0.0}};
    mp.noise = Box({0}, {1});
    CHECK(extract_noise(make_multiplicative(mp), Vec{2}, 0, Vec{1})[0] == doctest::Approx(0.5));
    // Out-of-support recovery is reported as inconsistent.
    CHECK_THROWS_AS(extract_noise(make_multiplicative(mp), Vec{2}, 0, Vec{3}), InvalidInput);
    AdditiveParams none;
    none.gain = 0.0;
    CHECK_THROWS_AS(extract_noise(make_additive(none), Vec{0}, 0, Vec{0}), InvalidInput);
}

TEST_CASE("reach over-approximation is sound for every preset") {
    std::mt19937_64 rng(99);
    for (const auto& pc : all_presets()) {
        const auto& m = pc.model;
        INFO(m.name);
        for (int k = 0; k < 1000; ++k) {
            const Box cell = random_cell(pc.domain, rng);
            const std::size_t a = rng() % m.num_modes();
            const Vec w = uniform_in(m.noise_support, rng);
            const Box r = reach_over_approx(m, cell, a, w);
            const Box rw = reach_over_approx(m, cell, a, m.noise_support);
            for (int j = 0; j < 20; ++j) {
                const Vec x = uniform_in(cell, rng);
                const Vec y = step(m, x, a, w);
                CHECK(r.inflated(1e-12).contains(y));
                CHECK(rw.inflated(1e-12).contains(step(m, x, a, uniform_in(m.noise_support, rng))));
            }
        }
    }
}

TEST_CASE("lipschitz bound is sound for every preset") {
    std::mt19937_64 rng(7);
    for (const auto& pc : all_presets()) {
        const auto& m = pc.model;
        INFO(m.name);
        for (Norm l : {Norm::One, Norm::Two, Norm::Inf}) {
            for (int k = 0; k < 1000; ++k) {
                const Box cell = random_cell(pc.domain, rng);
                const std::size_t a = rng() % m.num_modes();
                const double lw = lipschitz_cell_bound(m, cell, a, l);
                CHECK(lw >= 0.0);
                const Vec x = uniform_in(cell, rng);
                const Vec w = uniform_in(m.noise_support, rng), w2 = uniform_in(m.noise_support, rng);
                const Vec y = step(m, x, a, w), y2 = step(m, x, a, w2);
                Vec dy(y.size()), dw(w.size());
                for (std::size_t i = 0; i < y.size(); ++i) dy[i] = y[i] - y2[i];
                for (std::size_t i = 0; i < w.size(); ++i) dw[i] = w[i] - w2[i];
                CHECK(norm_of(dy, l) <= lw * norm_of(dw, l) + 1e-12);
            }
        }
    }
}

TEST_CASE("extract noise round trip") {
    std::mt19937_64 rng(5);
    for (const auto& pc : all_presets()) {
        const auto& m = pc.model;
        INFO(m.name);
        int checked = 0;
        for (int k = 0; k < 1000; ++k) {
            const Vec x = uniform_in(pc.domain, rng);
            const std::size_t a = rng() % m.num_modes();
            const Vec w = uniform_in(m.noise_support, rng);
            const Vec y = step(m, x, a, w);
            Vec back;
            try {
                back = extract_noise(m, x, a, y);
            } catch (const InvalidInput&) {
                continue;  // not injective at this state
            }
            ++checked;
            const Vec y2 = step(m, x, a, back);
            for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y2[i] - y[i]) <= 1e-9);
        }
        CHECK(checked > 900);
    }
}

TEST_CASE("ground truth noise stays in the support") {
    const Box w({-0.1, 0.0}, {0.1, 0.5});
    std::vector<GroundTruthNoise> laws{
        GroundTruthNoise::uniform(w, 1),
        GroundTruthNoise::truncated_gaussian(w, {0.0, 0.6}, {0.2, 0.3}, 2),
        GroundTruthNoise::mixture(w, {{{-0.1, 0.0}, {0.05, 0.05}, 1.0}, {{0.1, 0.5}, {0.05, 0.05}, 3.0}}, 3),
    };
    for (const auto& law : laws) {
        const auto ss = law.draw(5000);
        CHECK(ss.size() == 5000);
        for (std::size_t i = 0; i < ss.size(); ++i) CHECK(w.contains(ss.samples.row(i)));
        CHECK(law.draw(10).samples.data() == law.draw(10).samples.data());
    }
    auto j = nlohmann::json::parse(R"({"kind":"truncated-gaussian","mean":[0,0],"stddev":[1,1],"seed":4})");
    CHECK(GroundTruthNoise::from_json(j, w).kind() == GroundTruthNoise::Kind::TruncatedGaussian);
    CHECK_THROWS_AS(GroundTruthNoise::from_json(nlohmann::json{{"kind", "cauchy"}}, w), InvalidInput);
}

TEST_CASE("presets from json") {
    auto m = make_preset("pendulum", nlohmann::json{{"dt", 0.05}, {"torques", {-1.0, 1.0}}});
    CHECK(m.num_modes() == 2);
    CHECK(m.state_dim == 2);
    CHECK(make_preset("unicycle-2d", nlohmann::json{{"headings", 4}}).num_modes() == 4);
    CHECK(make_preset("unicycle-3d", nullptr).num_modes() == 10);
    CHECK(make_preset("additive", nlohmann::json{{"dim", 3}}).noise_support.dim() == 3);
    CHECK_THROWS_AS(make_preset("rocket", nullptr), InvalidInput);
    CHECK_THROWS_AS(make_preset("additive", nlohmann::json{{"inputs", {{0.0, 1.0}}}}), InvalidInput);
}
