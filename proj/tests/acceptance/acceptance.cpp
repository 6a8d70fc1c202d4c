// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
// Usage: drsyn_acceptance [criterion-id ...]   (no arguments runs everything)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles/ltlf_semantics.hpp"
#include "../oracles/transport.hpp"
#include "drsyn/inner.hpp"
#include "drsyn/pipeline.hpp"
#include "drsyn/simplex.hpp"

using namespace drsyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> run;
};

const Logger quiet = [](const std::string&) {};

std::string config_path(const std::string& name) { return std::string(DRSYN_CONFIG_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "drsyn_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// Everything downstream of the configuration, built in memory.
struct Instance {
    PipelineConfig cfg;
    SystemModel model;
    AmbiguityArtifact ambiguity;
    AbstractionArtifact abstraction;
    std::unique_ptr<ProductRmdp> product;
    Solution solution;

    explicit Instance(PipelineConfig c) : cfg(std::move(c)), model(make_preset(cfg.preset, cfg.params)) {
        ambiguity = compute_ambiguity(cfg, model);
        abstraction = compute_abstraction(cfg, model, ambiguity.ball);
        product = std::make_unique<ProductRmdp>(abstraction.rmdp, compile_formula(cfg, abstraction.labels),
                                                abstraction.labels);
        solution = solve(*product, cfg.solver);
    }
};

// Sandwich ---------------------------------------------------------------------

// The empirical kernel of every sampled x in q lies inside the interval row.
std::size_t sandwich_violations(const std::string& config, std::uint64_t seed, std::size_t& checks) {
    const PipelineConfig c = load_config(config_path(config));
    const SystemModel m = make_preset(c.preset, c.params);
    const auto center = empirical_distribution(GroundTruthNoise::from_json(c.sample_law, m.noise_support).draw(200));
    const Partition p = make_partition(c);
    const ImdpAbstraction imdp = build_imdp(m, p, center);

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<StateId> pick_q(0, p.num_cells() - 1);
    std::uniform_int_distribution<std::size_t> pick_a(0, m.num_modes() - 1);
    std::size_t violations = 0;
    for (int row = 0; row < 50; ++row) {
        const StateId q = pick_q(rng);
        const std::size_t a = pick_a(rng);
        const Box cell = p.cell(q);
        std::map<StateId, std::pair<double, double>> bounds;
        for (const auto& e : imdp.row(q, a)) bounds[e.dest] = {e.lower, e.upper};
        for (int k = 0; k < 20; ++k) {
            Vec x(p.dim());
            do {
                for (std::size_t i = 0; i < x.size(); ++i)
                    x[i] = std::uniform_real_distribution<double>(cell.lower[i], cell.upper[i])(rng);
            } while (p.locate(x) != q);
            std::map<StateId, double> kernel;
            for (std::size_t i = 0; i < center.size(); ++i)
                kernel[p.locate(step(m, x, a, center.atoms.row(i)))] += center.weights[i];
            std::set<StateId> dests;
            for (const auto& [d, _] : bounds) dests.insert(d);
            for (const auto& [d, _] : kernel) dests.insert(d);
            for (StateId d : dests) {
                ++checks;
                const double mass = kernel.count(d) ? kernel[d] : 0.0;
                const auto it = bounds.find(d);
                const double lo = it == bounds.end() ? 0.0 : it->second.first;
                const double hi = it == bounds.end() ? 0.0 : it->second.second;
                if (mass < lo - 1e-12 || mass > hi + 1e-12) ++violations;
            }
        }
    }
    return violations;
}

Outcome check_sandwich() {
    std::size_t checks = 0;
    const std::size_t v = sandwich_violations("additive_1d", 1, checks) + sandwich_violations("multiplicative_1d", 2, checks);
    return {v == 0, std::to_string(v) + " violations in " + std::to_string(checks) + " kernel entries"};
}

// Inner problem ------------------------------------------------------------------

Outcome check_inner() {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> u(0, 1);
    double worst_gap0 = 0.0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + rng() % 7;
        std::vector<double> g(n), lo(n), hi(n), v(n);
        double tot = 0;
        for (auto& x : g) tot += (x = u(rng) + 0.05);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] /= tot;
            lo[i] = std::max(0.0, g[i] - 0.3 * u(rng));
            hi[i] = std::min(1.0, g[i] + 0.3 * u(rng));
            v[i] = u(rng);
        }
        InnerProblem p;
        p.lower = lo;
        p.upper = hi;
        p.num_dests = n;
        p.cost.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p.cost[i * n + j] = i == j ? 0.0 : 0.05 + u(rng);
        for (Direction dir : {Direction::Worst, Direction::Best}) {
            const double greedy = greedy_interval_expectation(lo, hi, v, dir);
            const double lp = inner_expectation_lp(p, v, dir).value;
            const double dual = dir == Direction::Worst ? inner_worst_expectation(p, v).value
                                                        : inner_best_expectation(p, v).value;
            worst_gap0 = std::max({worst_gap0, std::abs(lp - greedy), std::abs(dual - greedy)});
        }
    }

    double worst_gap = 0.0;
    for (int k = 0; k < 200; ++k) {
        oracle::GridInstance g;
        const std::size_t sources = 1 + rng() % 2, dests = 2 + rng() % 2;
        if (sources == 1) {
            g.lower = {100};
            g.upper = {100};
        } else {
            int a = static_cast<int>(rng() % 101), b = static_cast<int>(rng() % 101);
            if (a > b) std::swap(a, b);
            g.lower = {a / 2, (100 - b) / 2};
            g.upper = {b, 100 - a};
        }
        for (std::size_t j = 0; j < dests; ++j) g.v.push_back(u(rng));
        g.cost.assign(sources, std::vector<double>(dests, 0.0));
        for (std::size_t i = 0; i < sources; ++i)
            for (std::size_t j = 0; j < dests; ++j) g.cost[i][j] = i == j ? 0.0 : 0.1 * static_cast<double>(1 + rng() % 10);
        g.theta = 0.003 * static_cast<double>(1 + rng() % 100);

        InnerProblem p;
        for (std::size_t i = 0; i < sources; ++i) {
            p.lower.push_back(g.lower[i] * 0.01);
            p.upper.push_back(g.upper[i] * 0.01);
            p.cost.insert(p.cost.end(), g.cost[i].begin(), g.cost[i].end());
        }
        p.num_dests = dests;
        p.theta = g.theta;
        for (bool minimize : {true, false}) {
            const double grid = oracle::grid_search(g, 100, minimize);
            const Direction dir = minimize ? Direction::Worst : Direction::Best;
            const double lp = inner_expectation_lp(p, g.v, dir).value;
            const double dual = minimize ? inner_worst_expectation(p, g.v).value : inner_best_expectation(p, g.v).value;
            worst_gap = std::max({worst_gap, std::abs(lp - grid), std::abs(dual - grid)});
        }
    }
    return {worst_gap0 <= 1e-9 && worst_gap <= 2e-2,
            "theta=0 max |LP-greedy| " + fmt("%.2e", worst_gap0) + ", theta>0 max |LP-grid| " + fmt("%.2e", worst_gap)};
}

// LTLf --------------------------------------------------------------------------

Outcome check_ltlf() {
    const std::vector<std::string> ap{"p", "q"};
    const auto formulas = oracle::enumerate_formulas(6, 2);
    const auto traces = oracle::enumerate_traces(5, 2);
    std::size_t total = 0, agree = 0, count = 0;
    for (const auto& layer : formulas)
        for (const auto& f : layer) {
            ++count;
            const ltlf::Dfa d = ltlf::to_dfa(ltlf::parse(oracle::print(f, ap), ap));
            for (const auto& t : traces) {
                ++total;
                agree += ltlf::accepts_trace(d, t) == oracle::holds(f, t, 0) ? 1 : 0;
            }
        }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agreements over " +
                                std::to_string(count) + " formulas"};
}

// Monotonicity ----------------------------------------------------------------

Solution solve_exact_sweeps(const ProductRmdp& prod, std::size_t sweeps) {
    SolveOptions o;
    o.tol = 1e-12;
    o.min_iter = sweeps;
    o.max_iter = sweeps;
    return solve(prod, o);
}

double mean_initial_lower(const ProductRmdp& prod, const ValueBounds& b) {
    double sum = 0.0;
    const std::size_t cells = prod.base().partition.num_cells();
    for (StateId q = 0; q < cells; ++q) sum += b.p_lower[prod.initial_state(q)];
    return sum / static_cast<double>(cells);
}

Outcome check_monotonicity() {
    // Same sweep count everywhere so that truncation cannot reorder the values.
    constexpr std::size_t kSweeps = 600;
    PipelineConfig c = load_config(config_path("unicycle_2d"));
    const SystemModel m = make_preset(c.preset, c.params);
    const AmbiguityArtifact amb = compute_ambiguity(c, m);
    const Partition p = make_partition(c);
    const LabelMap labels = attach_labels(p, c.regions);
    const ltlf::Dfa dfa = compile_formula(c, labels);
    const ImdpAbstraction imdp = build_imdp(m, p, amb.ball.center);

    const std::vector<double> radii{0.0, 0.5 * amb.ball.radius, amb.ball.radius, 2.0 * amb.ball.radius, 4.0 * amb.ball.radius};
    std::vector<RmdpAbstraction> rmdps;
    std::vector<Solution> sols;
    for (double r : radii) {
        AmbiguityBall ball = amb.ball;
        ball.radius = r;
        rmdps.push_back(build_rmdp(imdp, m, p, ball));
    }
    for (const auto& r : rmdps) sols.push_back(solve_exact_sweeps(ProductRmdp(r, dfa, labels), kSweeps));

    double lower_violation = 0.0, upper_violation = 0.0;
    std::size_t lower_bad = 0, upper_bad = 0;
    for (std::size_t k = 1; k < sols.size(); ++k)
        for (std::size_t s = 0; s < sols[k].bounds.p_lower.size(); ++s) {
            const double dl = sols[k].bounds.p_lower[s] - sols[k - 1].bounds.p_lower[s];
            const double du = sols[k - 1].bounds.p_upper[s] - sols[k].bounds.p_upper[s];
            if (dl > 0) ++lower_bad, lower_violation = std::max(lower_violation, dl);
            if (du > 0) ++upper_bad, upper_violation = std::max(upper_violation, du);
        }

    // Grid refinement at the configured radius.
    double mean_coarse = 0.0, mean_fine = 0.0;
    for (int cuts : {10, 20}) {
        PipelineConfig cc = c;
        cc.cuts = {cuts, cuts};
        const AbstractionArtifact abs = compute_abstraction(cc, m, amb.ball);
        const ProductRmdp prod(abs.rmdp, compile_formula(cc, abs.labels), abs.labels);
        const double mean = mean_initial_lower(prod, solve_exact_sweeps(prod, kSweeps).bounds);
        (cuts == 10 ? mean_coarse : mean_fine) = mean;
    }

    std::ostringstream os;
    os << "radii x" << radii.size() << ": p_lower increases " << lower_bad << " (max " << fmt("%.1e", lower_violation)
       << "), p_upper decreases " << upper_bad << " (max " << fmt("%.1e", upper_violation) << "); mean p_lower 10x10 "
       << fmt("%.4f", mean_coarse) << " -> 20x20 " << fmt("%.4f", mean_fine);
    return {lower_bad == 0 && upper_bad == 0 && mean_fine >= mean_coarse, os.str()};
}

// Trend -------------------------------------------------------------------------

Outcome check_trend() {
    std::vector<double> e;
    std::ostringstream os;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        PipelineConfig c = load_config(config_path("pendulum"));
        c.sample_count = n;
        c.cluster_k = std::min<std::size_t>(50, n);
        const Instance inst(c);
        e.push_back(e_avg(*inst.product, inst.solution.bounds));
        os << (e.size() > 1 ? ", " : "") << "N=" << n << " eps=" << fmt("%.4f", inst.ambiguity.epsilon_cluster)
           << " e_avg=" << fmt("%.4f", e.back());
    }
    return {e[0] > e[1] && e[1] > e[2], os.str()};
}

// Monte Carlo -------------------------------------------------------------------

Outcome check_monte_carlo() {
    std::size_t contained = 0, total = 0;
    std::ostringstream os;
    for (const char* name : {"additive_1d", "multiplicative_1d", "unicycle_2d", "pendulum"}) {
        PipelineConfig c = load_config(config_path(name));
        c.trials = 10000;
        c.validation_num_cells = 10;
        const Instance inst(c);
        const auto reports = run_validation(c, inst.model, *inst.product, inst.solution);
        std::size_t ok = 0;
        for (const auto& r : reports) ok += r.contained ? 1 : 0;
        contained += ok;
        total += reports.size();
        os << (total > reports.size() ? ", " : "") << name << " " << ok << "/" << reports.size();
    }
    return {contained == total && total == 40, os.str()};
}

// Clustering --------------------------------------------------------------------

double lp_transport(const PointSet& a, const std::vector<double>& wa, const PointSet& b, const std::vector<double>& wb,
                    Norm l) {
    LpProblem lp;
    const std::size_t n = wa.size(), k = wb.size();
    lp.num_vars = n * k;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            Vec d(a.dim());
            for (std::size_t t = 0; t < d.size(); ++t) d[t] = a.row(i)[t] - b.row(j)[t];
            lp.objective.push_back(norm_of(d, l));
        }
    for (std::size_t i = 0; i < n; ++i) {
        LpProblem::Row r;
        for (std::size_t j = 0; j < k; ++j) r.coeffs.push_back({i * k + j, 1.0});
        r.sense = LpProblem::Sense::Eq;
        r.rhs = wa[i];
        lp.rows.push_back(r);
    }
    for (std::size_t j = 0; j < k; ++j) {
        LpProblem::Row r;
        for (std::size_t i = 0; i < n; ++i) r.coeffs.push_back({i * k + j, 1.0});
        r.sense = LpProblem::Sense::Eq;
        r.rhs = wb[j];
        lp.rows.push_back(r);
    }
    const LpResult res = solve_lp(lp);
    return res.status == LpResult::Status::Optimal ? res.value : std::nan("");
}

Outcome check_clustering() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t violations = 0, lp_mismatch = 0;
    double min_slack = 1e9;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 6, d = 1 + rng() % 2, k = 1 + rng() % n;
        const Norm l = std::array{Norm::One, Norm::Two, Norm::Inf}[rng() % 3];
        PointSet pts(d);
        for (std::size_t i = 0; i < n; ++i) {
            Vec x(d);
            for (auto& v : x) v = std::round(u(rng) * 8.0) / 8.0;  // ties and duplicates are likely
            pts.push_back(x);
        }
        const SampleSet ss(pts, Box(Vec(d, 0.0), Vec(d, 1.0)));
        const ClusterResult cr = cluster(ss, k, rng(), l, 1);

        // Exact W1 by the transportation LP, cross-checked by the assignment
        // oracle on the clustered law expanded to n equal atoms.
        const double w_lp = lp_transport(pts, std::vector<double>(n, 1.0 / n), cr.center.atoms, cr.center.weights, l);
        std::vector<std::size_t> owner;
        for (std::size_t j = 0; j < cr.center.size(); ++j)
            for (long c = std::lround(cr.center.weights[j] * static_cast<double>(n)); c > 0; --c) owner.push_back(j);
        double w_assign = std::nan("");
        if (owner.size() == n)
            w_assign = oracle::assignment_cost(n, [&](std::size_t i, std::size_t j) {
                Vec diff(d);
                for (std::size_t s = 0; s < d; ++s) diff[s] = pts.row(i)[s] - cr.center.atoms.row(owner[j])[s];
                return norm_of(diff, l);
            });
        if (!(std::abs(w_lp - w_assign) <= 1e-9)) ++lp_mismatch;
        if (cr.inflation < w_lp - 1e-12) ++violations;
        min_slack = std::min(min_slack, cr.inflation - w_lp);
    }
    return {violations == 0 && lp_mismatch == 0, std::to_string(violations) + " violations in 100 sets (min slack " +
                                                     fmt("%.2e", min_slack) + ", LP/assignment mismatches " +
                                                     std::to_string(lp_mismatch) + ")"};
}

// Radius ------------------------------------------------------------------------

Outcome check_radius() {
    struct Case {
        const char* what;
        double got, want;
    };
    const double e4 = std::exp(-4.0);
    const std::vector<Case> cases{
        {"radius g=0", radius(8, e4, 1.0, 1, 1, Norm::Inf, 0.0), 1.0},
        {"radius g=0.25", radius(8, e4, 1.0, 1, 1, Norm::Inf, 0.25), 1.25},
        {"radius default g", radius(4, e4, 1.0, 1, 1, Norm::Inf), 1.0 + std::sqrt(8.0 / 4.0)},
        {"tail N=8", concentration_tail(8, e4, 1.0, 1), 1.0},
        {"tail N=2", concentration_tail(2, std::exp(-1.0), 1.0, 1), 1.0},
        {"tail N=1e4", concentration_tail(10000, 1e-9, 0.2, 1), 0.2 * std::sqrt(2.0 * std::log(1e9) / 1e4)},
        {"g N=4 d=1", mean_transport_bound(4, 1.0, 1, 1, Norm::Inf), 1.0},
        {"g N=1000 d=3", mean_transport_bound(1000, 1.0, 3, 1, Norm::Inf), 2.0 * std::sqrt(3.0) / 10.0},
    };
    std::size_t bad = 0;
    for (const auto& cs : cases) bad += std::abs(cs.got - cs.want) <= 1e-12 ? 0 : 1;
    bad += std::abs(concentration_tail(10000, 1e-9, 0.2, 1) - 0.0129) < 5e-5 ? 0 : 1;

    std::size_t sweep_bad = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        const auto n = static_cast<std::size_t>(std::llround(10.0 * std::pow(10.0, 0.25 * i)));
        const double r = radius(n, 1e-9, 0.4, 2, 1, Norm::Inf);
        sweep_bad += r < prev ? 0 : 1;
        prev = r;
    }
    prev = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double r = radius(1000, std::pow(10.0, -1.0 - i), 0.4, 2, 1, Norm::Inf);
        sweep_bad += r > prev ? 0 : 1;
        prev = r;
    }
    return {bad == 0 && sweep_bad == 0, std::to_string(cases.size() + 1 - bad) + "/" + std::to_string(cases.size() + 1) +
                                            " values, " + std::to_string(40 - sweep_bad) + "/40 monotone sweep steps"};
}

// Determinism -------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome check_determinism() {
    std::size_t files = 0, differing = 0;
    for (const char* name : {"additive_1d", "unicycle_2d"}) {
        PipelineConfig c = load_config(config_path(name));
        override_seed(c, 42);
        const auto a = scratch(std::string(name) + "_a"), b = scratch(std::string(name) + "_b");
        run_pipeline(c, a.string(), quiet);
        run_pipeline(c, b.string(), quiet);
        std::set<std::string> names;
        for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
        for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
        for (const auto& f : names) {
            ++files;
            if (!fs::exists(a / f) || !fs::exists(b / f) || slurp(a / f) != slurp(b / f)) ++differing;
        }
    }
    return {differing == 0 && files > 0, std::to_string(files - differing) + "/" + std::to_string(files) +
                                             " artifacts byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"sandwich", "empirical kernel within interval bounds", 10, check_sandwich},
        {"inner", "inner problem matches greedy and grid oracles", 60, check_inner},
        {"ltlf", "DFA acceptance matches finite-trace semantics", 120, check_ltlf},
        {"monotonicity", "bounds monotone in radius and grid refinement", 600, check_monotonicity},
        {"trend", "pendulum e_avg strictly decreasing in N", 900, check_trend},
        {"montecarlo", "Monte Carlo rates overlap certified intervals", 600, check_monte_carlo},
        {"clustering", "cluster inflation bounds exact W1", 60, check_clustering},
        {"radius", "radius values and monotone sweeps", 10, check_radius},
        {"determinism", "repeated pipeline runs are byte-identical", 600, check_determinism},
    };
    const std::set<std::string> only(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= c.budget_seconds;
        failures += pass ? 0 : 1;
        std::printf("%s %-13s %s: %s [%.1f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                    o.detail.c_str(), secs, c.budget_seconds);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
