#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drsyn/abstraction.hpp"
#include "drsyn/ambiguity.hpp"
#include "drsyn/dynamics.hpp"
#include "drsyn/geometry.hpp"
#include "drsyn/ltlf.hpp"
#include "drsyn/product.hpp"
#include "drsyn/validation.hpp"

namespace drsyn {

inline constexpr int kConfigVersion = 1;

/// Parsed and cross-checked pipeline configuration (see the README for the
/// JSON schema).
struct PipelineConfig {
    int version = kConfigVersion;

    std::string preset;
    nlohmann::json params = nlohmann::json::object();

    std::optional<std::string> samples_file;
    nlohmann::json sample_law = nlohmann::json::object();
    std::size_t sample_count = 0;

    double beta = 1e-9;
    int order = 1;
    Norm norm = Norm::Inf;
    std::optional<double> epsilon;
    std::optional<double> g_override;
    double transport_constant = kDefaultTransportConstant;
    std::optional<std::size_t> cluster_k;
    std::uint64_t cluster_seed = 0;

    Box domain;
    std::vector<int> cuts;
    std::vector<RegionDef> regions;
    std::string formula;

    SolveOptions solver;

    nlohmann::json validation_law = nlohmann::json::object();
    std::size_t trials = 1000;
    std::size_t horizon = 200;
    std::uint64_t validation_seed = 0;
    std::vector<StateId> validation_cells;
    std::size_t validation_num_cells = 10;
};

/// Reads and validates a configuration document. Relative sample paths are
/// resolved against `base_dir`. Throws InvalidInput naming the offending field.
PipelineConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
PipelineConfig load_config(const std::string& path);
/// Cross-field checks: preset dimensions, regions inside the domain and on
/// grid lines, formula atoms among the region names and "unsafe".
void validate_config(const PipelineConfig& c);
/// Replaces every seed (sample generator, clustering, validation) with `seed`.
void override_seed(PipelineConfig& c, std::uint64_t seed);

struct AmbiguityArtifact {
    AmbiguityBall ball;
    std::size_t n = 0;
    double epsilon = 0.0;
    std::size_t n_cluster = 0;
    double inflation = 0.0;
    double epsilon_cluster = 0.0;
    double phi = 0.0;
};

nlohmann::json ambiguity_to_json(const AmbiguityArtifact& a);
AmbiguityArtifact ambiguity_from_json(const nlohmann::json& j);

SampleSet load_samples(const PipelineConfig& c, const SystemModel& m);
AmbiguityArtifact compute_ambiguity(const PipelineConfig& c, const SystemModel& m);

struct AbstractionArtifact {
    Partition partition;
    LabelMap labels;
    RmdpAbstraction rmdp;
};

Partition make_partition(const PipelineConfig& c);
AbstractionArtifact compute_abstraction(const PipelineConfig& c, const SystemModel& m, const AmbiguityBall& ball);
ltlf::Dfa compile_formula(const PipelineConfig& c, const LabelMap& labels);
/// Start cells for Monte Carlo: the configured list, or a seeded draw of
/// distinct safe cells.
std::vector<StateId> validation_cells(const PipelineConfig& c, const Partition& p);
std::vector<McReport> run_validation(const PipelineConfig& c, const SystemModel& m, const ProductRmdp& prod,
                                     const Solution& sol);

/// Mean of p_upper - p_lower over the safe cells at the memory entered from each cell.
double e_avg(const ProductRmdp& prod, const ValueBounds& bounds);

struct Summary {
    std::string model;
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::size_t n = 0;
    double epsilon = 0.0;
    std::size_t n_cluster = 0;
    double epsilon_cluster = 0.0;
    double e_avg = 0.0;
    std::size_t dfa_states = 0;
    std::size_t iterations = 0;
    bool converged = false;
    double build_seconds = 0.0;
    double solve_seconds = 0.0;
};

/// Timings are left out so the document is reproducible.
nlohmann::json summary_to_json(const Summary& s);
std::string summary_table(const Summary& s);

using Logger = std::function<void(const std::string&)>;
void log_to_stderr(const std::string& msg);

/// Artifact file names inside the output directory.
namespace artifact {
inline constexpr const char* kAmbiguity = "ambiguity.json";
inline constexpr const char* kPartition = "partition.json";
inline constexpr const char* kAbstraction = "abstraction.json";
inline constexpr const char* kDfa = "dfa.json";
inline constexpr const char* kDfaDot = "dfa.dot";
inline constexpr const char* kBounds = "bounds.json";
inline constexpr const char* kBoundsCsv = "bounds.csv";
inline constexpr const char* kReport = "mc_report.json";
inline constexpr const char* kPlot = "plot.csv";
inline constexpr const char* kSummary = "summary.json";
}  // namespace artifact

/// Stage drivers. Each reads its inputs from `in_dir` (artifacts of earlier
/// stages) and writes its outputs to `out_dir`. Errors are rethrown as
/// StageError carrying the stage name.
void stage_radius(const PipelineConfig& c, const std::string& out_dir, const Logger& log = log_to_stderr);
void stage_abstract(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir,
                    const Logger& log = log_to_stderr);
void stage_dfa(const PipelineConfig& c, const std::string& out_dir, const Logger& log = log_to_stderr);
void stage_solve(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir,
                 const Logger& log = log_to_stderr);
void stage_validate(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir,
                    const Logger& log = log_to_stderr);
void stage_export_plot(const PipelineConfig& c, const std::string& in_dir, const std::string& out_dir,
                       const Logger& log = log_to_stderr);

/// All stages in order; writes every artifact plus summary.json.
Summary run_pipeline(const PipelineConfig& c, const std::string& out_dir, const Logger& log = log_to_stderr);

class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what);
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace drsyn
