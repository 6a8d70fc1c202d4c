#include <doctest.h>

#include <cmath>
#include <random>

#include "drsyn/error.hpp"
#include "drsyn/geometry.hpp"

using namespace drsyn;

TEST_CASE("grid construction") {
    auto p = Partition::grid(Box({0, 0}, {1, 1}), {2, 2});
    CHECK(p.num_cells() == 4);
    CHECK(p.num_states() == 5);
    CHECK(p.unsafe_id() == 4);
    CHECK(p.cell(0) == Box({0, 0}, {0.5, 0.5}));

    auto one = Partition::grid(Box({0}, {1}), {1});
    CHECK(one.num_cells() == 1);
    CHECK(one.cell(0) == one.domain());

    auto tall = Partition::grid(Box({-0.5, 0}, {0.5, 2}), {1, 4});
    REQUIRE(tall.num_cells() == 4);
    for (StateId q = 0; q < 4; ++q) CHECK(tall.cell(q).width(1) == doctest::Approx(0.5));

    CHECK_THROWS_AS(Partition::grid(Box({0}, {1}), {0}), InvalidInput);
    CHECK_THROWS_AS(Partition::grid(Box({0}, {1}), {-2}), InvalidInput);
    CHECK_THROWS_AS(Partition::grid(Box({0, 1}, {1, 1}), {2, 2}), InvalidInput);
}

TEST_CASE("axis 0 varies fastest and indexing round-trips") {
    auto p = Partition::grid(Box({0, 0, 0}, {3, 2, 1}), {3, 2, 2});
    for (StateId q = 0; q < p.num_cells(); ++q) CHECK(p.index(p.coords(q)) == q);
    CHECK(p.coords(1) == std::vector<int>{1, 0, 0});
    CHECK(p.coords(3) == std::vector<int>{0, 1, 0});
}

TEST_CASE("locate") {
    auto p = Partition::grid(Box({0, 0}, {1, 1}), {2, 2});
    CHECK(p.locate(std::vector<double>{2, 2}) == p.unsafe_id());
    const StateId q = p.locate(std::vector<double>{0.5, 0.5});
    CHECK(p.cell(q).lower == Vec{0.5, 0.5});
    CHECK(p.locate(std::vector<double>{1, 1}) == 3);
    CHECK(p.locate(std::vector<double>{0, 0}) == 0);
    CHECK(p.locate(std::vector<double>{1.0000001, 0.5}) == p.unsafe_id());
    CHECK_THROWS_AS(p.locate(std::vector<double>{NAN, 0}), InvalidInput);
}

TEST_CASE("locate returns a cell containing the point and covers the plane") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> cuts(1, 7);
        auto p = Partition::grid(Box({-1, 0}, {2, 0.7}), {cuts(rng), cuts(rng)});
        std::uniform_real_distribution<double> ux(-1.5, 2.5), uy(-0.3, 1.0);
        for (int k = 0; k < 500; ++k) {
            std::vector<double> x{ux(rng), uy(rng)};
            // Land some points exactly on grid lines.
            if (k % 3 == 0) x[0] = p.grid_line(0, k % (p.cuts()[0] + 1));
            const StateId q = p.locate(x);
            if (q == p.unsafe_id()) CHECK_FALSE(p.domain().contains(x));
            else CHECK(p.cell(q).contains(x));
        }
    }
}

TEST_CASE("labels") {
    auto p = Partition::grid(Box({0, 0}, {1, 1}), {2, 2});
    auto all = attach_labels(p, {{"room", p.domain()}});
    for (StateId q = 0; q < 4; ++q) CHECK(all.labels(q) == std::vector<int>{0});
    CHECK(all.labels(p.unsafe_id()) == std::vector<int>{all.unsafe_proposition()});
    CHECK(all.propositions().back() == "unsafe");

    auto half = attach_labels(p, {{"left", Box({0, 0}, {0.5, 1})}});
    CHECK(half.labels(0) == std::vector<int>{0});
    CHECK(half.labels(2) == std::vector<int>{0});
    CHECK(half.labels(1).empty());
    CHECK(half.labels(3).empty());

    try {
        attach_labels(p, {{"bad", Box({0, 0}, {0.3, 1})}});
        FAIL("misaligned region accepted");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("misaligned on axis 0") != std::string::npos);
        CHECK(std::string(e.what()).find("bad") != std::string::npos);
    }
    CHECK_THROWS_AS(attach_labels(p, {{"unsafe", p.domain()}}), InvalidInput);
}

TEST_CASE("attach_labels accepts exactly the unions of cells") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> cuts(1, 6);
        const int cx = cuts(rng), cy = cuts(rng);
        auto p = Partition::grid(Box({0, -1}, {3, 1}), {cx, cy});
        std::uniform_int_distribution<int> ix(0, cx), iy(0, cy);
        int a = ix(rng), b = ix(rng), c = iy(rng), d = iy(rng);
        if (a == b || c == d) continue;
        if (a > b) std::swap(a, b);
        if (c > d) std::swap(c, d);
        Box aligned({p.grid_line(0, a), p.grid_line(1, c)}, {p.grid_line(0, b), p.grid_line(1, d)});
        const auto lm = attach_labels(p, {{"r", aligned}});
        for (StateId q = 0; q < p.num_cells(); ++q) {
            const auto co = p.coords(q);
            const bool inside = co[0] >= a && co[0] < b && co[1] >= c && co[1] < d;
            CHECK(lm.labels(q).empty() == !inside);
        }
        Box shifted = aligned;
        shifted.upper[1] -= 0.37 * p.cell_width(1);
        CHECK_THROWS_AS(attach_labels(p, {{"r", shifted}}), InvalidInput);
    }
}

TEST_CASE("cell cost") {
    auto p = Partition::grid(Box({0, 0}, {1, 1}), {2, 2});
    CHECK(cell_cost(p, 1, 1, Norm::Inf, 1) == 0.0);
    CHECK(cell_cost(p, 0, p.unsafe_id(), Norm::Inf, 1) == 0.0);
    CHECK(cell_cost(p, p.unsafe_id(), 0, Norm::Inf, 1) == 0.0);

    // [0,1]^2 vs [2,4]x[0,1] as cells of a grid over [0,4]x[0,1] with unit cells.
    auto wide = Partition::grid(Box({0, 0}, {4, 1}), {4, 1});
    CHECK(cell_cost(wide, 0, 2, Norm::Inf, 1) == doctest::Approx(1.0));
    CHECK(cell_cost(wide, 0, 3, Norm::Inf, 2) == doctest::Approx(4.0));

    auto big = Partition::grid(Box({0, 0}, {5, 5}), {5, 5});
    const StateId mid = big.index(std::vector<int>{2, 2});
    CHECK(cell_cost(big, mid, big.unsafe_id(), Norm::Inf, 1) == doctest::Approx(2.0));
    CHECK(cell_cost(big, mid, big.unsafe_id(), Norm::One, 2) == doctest::Approx(4.0));
    const StateId corner = big.index(std::vector<int>{4, 4});
    CHECK(cell_cost(big, 0, corner, Norm::Two, 1) == doctest::Approx(3.0 * std::sqrt(2.0)));
    CHECK(cell_cost(big, 0, corner, Norm::One, 1) == doctest::Approx(6.0));
    CHECK_THROWS_AS(cell_cost(big, 0, 99, Norm::Inf, 1), InvalidInput);
}

TEST_CASE("cell cost is symmetric and a lower bound on sampled distances") {
    auto p = Partition::grid(Box({-1, 0}, {2, 1.5}), {6, 3});
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<StateId> pick(0, p.num_cells() - 1);
    for (Norm l : {Norm::One, Norm::Two, Norm::Inf})
        for (int s : {1, 2}) {
            for (int k = 0; k < 10000; ++k) {
                const StateId q = pick(rng), r = pick(rng);
                const double c = cell_cost(p, q, r, l, s);
                CHECK(c == cell_cost(p, r, q, l, s));
                const Box a = p.cell(q), b = p.cell(r);
                Vec x(2), y(2), d(2);
                for (int i = 0; i < 2; ++i) {
                    x[i] = std::uniform_real_distribution<double>(a.lower[i], a.upper[i])(rng);
                    y[i] = std::uniform_real_distribution<double>(b.lower[i], b.upper[i])(rng);
                    d[i] = x[i] - y[i];
                }
                CHECK(std::pow(norm_of(d, l), s) >= c - 1e-12);
            }
        }
}
