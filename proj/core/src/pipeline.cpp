#include "drsyn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "drsyn/error.hpp"
#include "drsyn/sample_io.hpp"
#include "drsyn/serialize.hpp"

namespace drsyn {

namespace fs = std::filesystem;

StageError::StageError(const std::string& stage, const std::string& what)
    : Error("stage '" + stage + "': " + what), stage_(stage) {}

namespace {

template <class T>
T field(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidInput(std::string("config: field '") + key + "' has the wrong type");
    }
}

std::vector<std::string> proposition_names(const std::vector<RegionDef>& regions) {
    std::vector<std::string> names;
    for (const auto& r : regions)
        if (std::find(names.begin(), names.end(), r.name) == names.end()) names.push_back(r.name);
    names.push_back(kUnsafeProposition);
    return names;
}

std::string join(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

template <class Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ProductInputs {
    PartitionDoc doc;
    LabelMap labels;
    RmdpAbstraction rmdp;
    ltlf::Dfa dfa;
};

ProductInputs load_product_inputs(const std::string& in_dir) {
    ProductInputs in;
    in.doc = partition_from_json(read_json_file(join(in_dir, artifact::kPartition)));
    in.labels = attach_labels(in.doc.partition, in.doc.regions);
    in.rmdp = abstraction_from_json(read_json_file(join(in_dir, artifact::kAbstraction)), in.doc.partition);
    in.dfa = dfa_from_json(read_json_file(join(in_dir, artifact::kDfa)));
    return in;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
}

}  // namespace

void log_to_stderr(const std::string& msg) { std::cerr << "[synth] " << msg << '\n'; }

PipelineConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw InvalidInput("config: top level must be an object");
    PipelineConfig c;
    c.version = field(j, "version", kConfigVersion);
    if (c.version != kConfigVersion)
        throw InvalidInput("config: unsupported version " + std::to_string(c.version) + " (expected " +
                           std::to_string(kConfigVersion) + ")");

    const json sys = j.value("system", json::object());
    c.preset = field<std::string>(sys, "preset", "");
    if (c.preset.empty()) throw InvalidInput("config: system.preset is required");
    c.params = sys.value("params", json::object());

    const json smp = j.value("samples", json::object());
    if (smp.contains("file")) {
        fs::path p = smp.at("file").get<std::string>();
        if (p.is_relative()) p = fs::path(base_dir) / p;
        c.samples_file = p.string();
    } else if (smp.contains("generate")) {
        const json& g = smp.at("generate");
        c.sample_law = g.value("law", json::object());
        c.sample_count = field<std::size_t>(g, "count", 0);
        if (c.sample_count == 0) throw InvalidInput("config: samples.generate.count must be positive");
    } else {
        throw InvalidInput("config: samples needs either 'file' or 'generate'");
    }

    const json amb = j.value("ambiguity", json::object());
    c.beta = field(amb, "beta", c.beta);
    c.order = field(amb, "s", c.order);
    c.norm = parse_norm(field<std::string>(amb, "l", "inf"));
    if (amb.contains("epsilon")) c.epsilon = amb.at("epsilon").get<double>();
    if (amb.contains("g_override")) c.g_override = amb.at("g_override").get<double>();
    c.transport_constant = field(amb, "constant", c.transport_constant);
    if (amb.contains("cluster")) {
        const json& cl = amb.at("cluster");
        c.cluster_k = field<std::size_t>(cl, "k", 0);
        c.cluster_seed = field<std::uint64_t>(cl, "seed", 0);
    }

    const json part = j.value("partition", json::object());
    if (!part.contains("domain") || !part.contains("cuts")) throw InvalidInput("config: partition needs 'domain' and 'cuts'");
    c.domain = box_from_json(part.at("domain"));
    c.cuts = part.at("cuts").get<std::vector<int>>();

    for (const auto& r : j.value("regions", json::array()))
        c.regions.push_back(RegionDef{r.at("name").get<std::string>(), box_from_json(r)});
    c.formula = field<std::string>(j, "formula", "");
    if (c.formula.empty()) throw InvalidInput("config: formula is required");

    const json sol = j.value("solver", json::object());
    c.solver.tol = field(sol, "tol", c.solver.tol);
    c.solver.max_iter = field(sol, "max_iter", c.solver.max_iter);

    const json val = j.value("validation", json::object());
    c.validation_law = val.value("law", c.sample_law);
    c.trials = field(val, "trials", c.trials);
    c.horizon = field(val, "horizon", c.horizon);
    c.validation_seed = field<std::uint64_t>(val, "seed", 0);
    c.validation_cells = field(val, "cells", c.validation_cells);
    c.validation_num_cells = field(val, "num_cells", c.validation_num_cells);

    validate_config(c);
    return c;
}

PipelineConfig load_config(const std::string& path) {
    const fs::path p(path);
    return parse_config(read_json_file(path), p.has_parent_path() ? p.parent_path().string() : ".");
}

void validate_config(const PipelineConfig& c) {
    const SystemModel m = make_preset(c.preset, c.params);
    if (c.domain.dim() != m.state_dim)
        throw InvalidInput("config: domain has dimension " + std::to_string(c.domain.dim()) + " but preset '" + c.preset +
                           "' has state dimension " + std::to_string(m.state_dim));
    if (c.cuts.size() != m.state_dim) throw InvalidInput("config: partition.cuts must have one entry per state axis");
    if (!(c.beta > 0.0 && c.beta < 1.0)) throw InvalidInput("config: ambiguity.beta must lie in (0, 1)");
    if (c.order < 1) throw InvalidInput("config: ambiguity.s must be >= 1");
    if (c.epsilon && *c.epsilon < 0.0) throw InvalidInput("config: ambiguity.epsilon must be nonnegative");
    if (c.cluster_k && *c.cluster_k == 0) throw InvalidInput("config: ambiguity.cluster.k must be positive");
    if (!(c.solver.tol > 0.0) || c.solver.max_iter == 0) throw InvalidInput("config: solver tol and max_iter must be positive");
    if (c.horizon == 0) throw InvalidInput("config: validation.horizon must be positive");
    for (const auto& r : c.regions) {
        if (r.name == kUnsafeProposition) throw InvalidInput("config: region name 'unsafe' is reserved");
        if (r.box.dim() != c.domain.dim()) throw InvalidInput("config: region '" + r.name + "' has the wrong dimension");
        if (!c.domain.contains(r.box)) throw InvalidInput("config: region '" + r.name + "' leaves the domain");
    }
    const Partition p = Partition::grid(c.domain, c.cuts);
    attach_labels(p, c.regions);
    for (StateId q : c.validation_cells)
        if (q >= p.num_cells()) throw InvalidInput("config: validation cell " + std::to_string(q) + " is not a safe cell");
    ltlf::parse(c.formula, proposition_names(c.regions));
}

void override_seed(PipelineConfig& c, std::uint64_t seed) {
    c.sample_law["seed"] = seed;
    c.validation_law["seed"] = seed;
    c.cluster_seed = seed;
    c.validation_seed = seed;
}

json ambiguity_to_json(const AmbiguityArtifact& a) {
    json j = ball_to_json(a.ball);
    j["N"] = a.n;
    j["epsilon"] = a.epsilon;
    j["N_cluster"] = a.n_cluster;
    j["inflation"] = a.inflation;
    j["epsilon_cluster"] = a.epsilon_cluster;
    j["phi"] = a.phi;
    return j;
}

AmbiguityArtifact ambiguity_from_json(const json& j) {
    AmbiguityArtifact a;
    a.ball = ball_from_json(j);
    a.n = j.at("N").get<std::size_t>();
    a.epsilon = j.at("epsilon").get<double>();
    a.n_cluster = j.at("N_cluster").get<std::size_t>();
    a.inflation = j.at("inflation").get<double>();
    a.epsilon_cluster = j.at("epsilon_cluster").get<double>();
    a.phi = j.at("phi").get<double>();
    return a;
}

SampleSet load_samples(const PipelineConfig& c, const SystemModel& m) {
    if (c.samples_file) {
        PointSet pts = read_points(*c.samples_file);
        if (pts.dim() != m.noise_dim)
            throw InvalidInput("samples have dimension " + std::to_string(pts.dim()) + " but the system noise has " +
                               std::to_string(m.noise_dim));
        return SampleSet(std::move(pts), m.noise_support);
    }
    return GroundTruthNoise::from_json(c.sample_law, m.noise_support).draw(c.sample_count);
}

AmbiguityArtifact compute_ambiguity(const PipelineConfig& c, const SystemModel& m) {
    const SampleSet ss = load_samples(c, m);
    AmbiguityArtifact a;
    a.n = ss.size();
    a.phi = support_diameter(ss);
    a.epsilon = c.epsilon ? *c.epsilon
                          : radius(ss.size(), c.beta, a.phi, ss.dim(), c.order, c.norm, c.g_override, c.transport_constant);
    a.ball.order = c.order;
    a.ball.norm = c.norm;
    a.ball.beta = c.beta;
    if (c.cluster_k && *c.cluster_k < ss.size()) {
        ClusterResult cr = cluster(ss, *c.cluster_k, c.cluster_seed, c.norm, c.order);
        a.ball.center = std::move(cr.center);
        a.inflation = cr.inflation;
    } else {
        a.ball.center = empirical_distribution(ss);
    }
    a.n_cluster = a.ball.center.size();
    a.epsilon_cluster = a.epsilon + a.inflation;
    a.ball.radius = a.epsilon_cluster;
    return a;
}

Partition make_partition(const PipelineConfig& c) { return Partition::grid(c.domain, c.cuts); }

AbstractionArtifact compute_abstraction(const PipelineConfig& c, const SystemModel& m, const AmbiguityBall& ball) {
    AbstractionArtifact a;
    a.partition = make_partition(c);
    a.labels = attach_labels(a.partition, c.regions);
    a.rmdp = build_rmdp(build_imdp(m, a.partition, ball.center), m, a.partition, ball);
    return a;
}

ltlf::Dfa compile_formula(const PipelineConfig& c, const LabelMap& labels) {
    return ltlf::to_dfa(ltlf::parse(c.formula, labels.propositions()));
}

std::vector<StateId> validation_cells(const PipelineConfig& c, const Partition& p) {
    if (!c.validation_cells.empty()) return c.validation_cells;
    std::vector<StateId> cells(p.num_cells());
    std::iota(cells.begin(), cells.end(), StateId{0});
    std::mt19937_64 rng(splitmix64(c.validation_seed));
    const std::size_t k = std::min(c.validation_num_cells, cells.size());
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, cells.size() - 1);
        std::swap(cells[i], cells[pick(rng)]);
    }
    cells.resize(k);
    return cells;
}

std::vector<McReport> run_validation(const PipelineConfig& c, const SystemModel& m, const ProductRmdp& prod,
                                     const Solution& sol) {
    const GroundTruthNoise law = GroundTruthNoise::from_json(c.validation_law, m.noise_support);
    std::vector<McReport> out;
    for (StateId q : validation_cells(c, prod.base().partition))
        out.push_back(monte_carlo(m, prod, sol.strategy, sol.bounds, law, q, c.trials, c.horizon,
                                  c.validation_seed ^ (static_cast<std::uint64_t>(q) << 32)));
    return out;
}

double e_avg(const ProductRmdp& prod, const ValueBounds& bounds) {
    const std::size_t cells = prod.base().partition.num_cells();
    double sum = 0.0;
    for (StateId q = 0; q < cells; ++q) {
        const std::size_t s = prod.initial_state(q);
        sum += bounds.p_upper[s] - bounds.p_lower[s];
    }
    return cells > 0 ? sum / static_cast<double>(cells) : 0.0;
}

json summary_to_json(const Summary& s) {
    return json{{"model", s.model},
                {"num_states", s.num_states},
                {"num_actions", s.num_actions},
                {"N", s.n},
                {"epsilon", s.epsilon},
                {"N_cluster", s.n_cluster},
                {"epsilon_cluster", s.epsilon_cluster},
                {"e_avg", s.e_avg},
                {"dfa_states", s.dfa_states},
                {"iterations", s.iterations},
                {"converged", s.converged}};
}

std::string summary_table(const Summary& s) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "system" << std::setw(8) << "|Q|" << std::setw(6) << "|A|" << std::setw(8)
       << "N" << std::setw(12) << "eps" << std::setw(10) << "N_clust" << std::setw(12) << "eps_clust" << std::setw(12)
       << "e_avg" << std::setw(12) << "build[s]" << "solve[s]\n";
    os << std::setw(16) << s.model << std::setw(8) << s.num_states << std::setw(6) << s.num_actions << std::setw(8)
       << s.n << std::setw(12) << std::setprecision(4) << s.epsilon << std::setw(10) << s.n_cluster << std::setw(12)
       << s.epsilon_cluster << std::setw(12) << s.e_avg << std::setw(12) << std::fixed << std::setprecision(2)
       << s.build_seconds << s.solve_seconds << '\n';
    return os.str();
}

void stage_radius(const PipelineConfig& c, const std::string& out_dir, const Logger& log) {
    run_stage("radius", [&] {
        const SystemModel m = make_preset(c.preset, c.params);
        const AmbiguityArtifact a = compute_ambiguity(c, m);
        fs::create_directories(out_dir);
        write_json_file(join(out_dir, artifact::kAmbiguity), ambiguity_to_json(a));
        std::ostringstream os;
        os << "radius: N=" << a.n << " eps=" << a.epsilon << " atoms=" << a.n_cluster << " eps_cluster=" << a.epsilon_cluster;
        log(os.str());
    });
}

void stage_abstract(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir, const Logger& log) {
    run_stage("abstract", [&] {
        const SystemModel m = make_preset(c.preset, c.params);
        const AmbiguityArtifact amb = ambiguity_from_json(read_json_file(join(in_dir, artifact::kAmbiguity)));
        const AbstractionArtifact a = compute_abstraction(c, m, amb.ball);
        fs::create_directories(out_dir);
        write_json_file(join(out_dir, artifact::kPartition), partition_to_json(a.partition, c.regions));
        AbstractionMetadata meta{m.name, partition_hash(a.partition, c.regions), amb.ball, std::nullopt};
        write_json_file(join(out_dir, artifact::kAbstraction), abstraction_to_json(a.rmdp, meta));
        const auto st = abstraction_stats(a.rmdp);
        std::ostringstream os;
        os << "abstract: |Q|=" << a.partition.num_states() << " |A|=" << m.num_modes() << " nonzeros=" << st.nonzeros;
        log(os.str());
    });
}

void stage_dfa(const PipelineConfig& c, const std::string& out_dir, const Logger& log) {
    run_stage("dfa", [&] {
        const LabelMap labels = attach_labels(make_partition(c), c.regions);
        const ltlf::Dfa d = compile_formula(c, labels);
        fs::create_directories(out_dir);
        write_json_file(join(out_dir, artifact::kDfa), dfa_to_json(d));
        write_text(join(out_dir, artifact::kDfaDot), ltlf::to_dot(d));
        log("dfa: " + std::to_string(d.num_states) + " states");
    });
}

void stage_solve(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir, const Logger& log) {
    run_stage("solve", [&] {
        const ProductInputs in = load_product_inputs(in_dir);
        const ProductRmdp prod = build_product(in.rmdp, in.dfa, in.labels);
        const Solution sol = solve(prod, c.solver);
        if (!sol.bounds.converged) {
            std::ostringstream os;
            os << "solve: WARNING value iteration did not converge, residual " << std::scientific << sol.bounds.residual;
            log(os.str());
        }
        fs::create_directories(out_dir);
        write_json_file(join(out_dir, artifact::kBounds), bounds_to_json(prod, sol.bounds, sol.strategy));
        std::ofstream csv(join(out_dir, artifact::kBoundsCsv));
        write_bounds_csv(csv, prod, sol.bounds, sol.strategy);
        log("solve: " + std::to_string(sol.bounds.iterations) + " iterations, e_avg=" + std::to_string(e_avg(prod, sol.bounds)));
    });
}

void stage_validate(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir, const Logger& log) {
    run_stage("validate", [&] {
        const SystemModel m = make_preset(c.preset, c.params);
        const ProductInputs in = load_product_inputs(in_dir);
        const ProductRmdp prod = build_product(in.rmdp, in.dfa, in.labels);
        Solution sol;
        bounds_from_json(read_json_file(join(in_dir, artifact::kBounds)), prod, sol.bounds, sol.strategy);
        const auto reports = run_validation(c, m, prod, sol);
        json arr = json::array();
        std::size_t contained = 0;
        for (const auto& r : reports) {
            arr.push_back(report_to_json(r));
            contained += r.contained ? 1 : 0;
        }
        fs::create_directories(out_dir);
        write_json_file(join(out_dir, artifact::kReport), json{{"confidence", kMcConfidence}, {"reports", arr}});
        log("validate: " + std::to_string(contained) + "/" + std::to_string(reports.size()) + " cells contained");
    });
}

void stage_export_plot(const PipelineConfig& /*c*/, const std::string& in_dir, const std::string& out_dir,
                       const Logger& log) {
    run_stage("export-plot-data", [&] {
        const ProductInputs in = load_product_inputs(in_dir);
        const ProductRmdp prod = build_product(in.rmdp, in.dfa, in.labels);
        Solution sol;
        bounds_from_json(read_json_file(join(in_dir, artifact::kBounds)), prod, sol.bounds, sol.strategy);
        fs::create_directories(out_dir);
        std::ofstream out(join(out_dir, artifact::kPlot));
        write_plot_csv(out, prod, sol.bounds, sol.strategy);
        log(std::string("export-plot-data: wrote ") + artifact::kPlot);
    });
}

Summary run_pipeline(const PipelineConfig& c, const std::string& out_dir, const Logger& log) {
    validate_config(c);
    Summary s;
    const auto t0 = std::chrono::steady_clock::now();
    stage_radius(c, out_dir, log);
    stage_abstract(c, out_dir, out_dir, log);
    s.build_seconds = seconds_since(t0);
    stage_dfa(c, out_dir, log);
    const auto t1 = std::chrono::steady_clock::now();
    stage_solve(c, out_dir, out_dir, log);
    s.solve_seconds = seconds_since(t1);
    if (c.trials > 0) stage_validate(c, out_dir, out_dir, log);
    stage_export_plot(c, out_dir, out_dir, log);

    run_stage("summary", [&] {
        const SystemModel m = make_preset(c.preset, c.params);
        const AmbiguityArtifact amb = ambiguity_from_json(read_json_file(join(out_dir, artifact::kAmbiguity)));
        const ProductInputs in = load_product_inputs(out_dir);
        const ProductRmdp prod = build_product(in.rmdp, in.dfa, in.labels);
        ValueBounds b;
        Strategy st;
        bounds_from_json(read_json_file(join(out_dir, artifact::kBounds)), prod, b, st);
        s.model = m.name;
        s.num_states = in.doc.partition.num_states();
        s.num_actions = m.num_modes();
        s.n = amb.n;
        s.epsilon = amb.epsilon;
        s.n_cluster = amb.n_cluster;
        s.epsilon_cluster = amb.epsilon_cluster;
        s.e_avg = e_avg(prod, b);
        s.dfa_states = in.dfa.num_states;
        s.iterations = b.iterations;
        s.converged = b.converged;
        write_json_file(join(out_dir, artifact::kSummary), summary_to_json(s));
    });
    return s;
}

}  // namespace drsyn
