#include <benchmark/benchmark.h>

#include <random>

#include "drsyn/abstraction.hpp"
#include "drsyn/inner.hpp"
#include "drsyn/ltlf.hpp"

using namespace drsyn;

namespace {

InnerProblem random_row(std::size_t sources, std::size_t dests, double theta, std::mt19937_64& rng,
                        std::vector<double>& v) {
    std::uniform_real_distribution<double> u(0, 1);
    InnerProblem p;
    p.num_dests = dests;
    p.theta = theta;
    for (std::size_t i = 0; i < sources; ++i) {
        p.lower.push_back(0.0);
        p.upper.push_back(2.0 / static_cast<double>(sources));
        for (std::size_t j = 0; j < dests; ++j) p.cost.push_back(i == j ? 0.0 : 0.05 + u(rng));
    }
    v.resize(dests);
    for (auto& x : v) x = u(rng);
    return p;
}

void BM_InnerDual(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(state.range(0));
    const InnerProblem p = random_row(n, n + 4, 0.1, rng, v);
    for (auto _ : state) benchmark::DoNotOptimize(inner_worst_expectation(p, v).value);
}
BENCHMARK(BM_InnerDual)->Arg(4)->Arg(16)->Arg(64);

void BM_InnerLp(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(state.range(0));
    const InnerProblem p = random_row(n, n + 4, 0.1, rng, v);
    for (auto _ : state) benchmark::DoNotOptimize(inner_expectation_lp(p, v, Direction::Worst).value);
}
BENCHMARK(BM_InnerLp)->Arg(4)->Arg(16);

void BM_BuildImdp(benchmark::State& state) {
    const SystemModel m = make_additive(AdditiveParams{});
    const Partition p = Partition::grid(Box({0.0}, {2.0}), {static_cast<int>(state.range(0))});
    std::mt19937_64 rng(3);
    PointSet atoms(1);
    for (int i = 0; i < 50; ++i) atoms.push_back(Vec{std::uniform_real_distribution<double>(-0.05, 0.05)(rng)});
    const DiscreteDistribution center = empirical_distribution(SampleSet(atoms, m.noise_support));
    for (auto _ : state) benchmark::DoNotOptimize(build_imdp(m, p, center).nonzeros());
}
BENCHMARK(BM_BuildImdp)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_DfaCompile(benchmark::State& state) {
    const std::vector<std::string> ap{"a", "b", "c", "unsafe"};
    const char* text = "G !unsafe & F (a & X F (b & X F c)) & (!b U a)";
    for (auto _ : state) benchmark::DoNotOptimize(ltlf::to_dfa(ltlf::parse(text, ap)).num_states);
}
BENCHMARK(BM_DfaCompile)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
