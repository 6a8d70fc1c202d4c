#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "drsyn/abstraction.hpp"
#include "drsyn/ambiguity.hpp"
#include "drsyn/geometry.hpp"
#include "drsyn/ltlf.hpp"
#include "drsyn/product.hpp"
#include "drsyn/validation.hpp"

namespace drsyn {

using nlohmann::json;

json box_to_json(const Box& b);
Box box_from_json(const json& j);

/// {domain: {lower, upper}, cuts, regions: [{name, lower, upper}]}
json partition_to_json(const Partition& p, const std::vector<RegionDef>& regions);

struct PartitionDoc {
    Partition partition;
    std::vector<RegionDef> regions;
};
PartitionDoc partition_from_json(const json& j);

std::uint64_t fnv1a64(std::string_view bytes);
/// Hash of the canonical partition document.
std::uint64_t partition_hash(const Partition& p, const std::vector<RegionDef>& regions);

/// {atoms, weights, radius, s, l, beta}
json ball_to_json(const AmbiguityBall& b);
AmbiguityBall ball_from_json(const json& j);

struct AbstractionMetadata {
    std::string model;
    std::uint64_t partition_hash = 0;
    AmbiguityBall ball;
    /// Left out of the document unless set, so repeated builds are byte-identical.
    std::optional<std::string> timestamp;
};

/// Sparse triples [q, a, q', lower, upper], per-row budgets and restricted
/// supports, stats and metadata.
json abstraction_to_json(const RmdpAbstraction& r, const AbstractionMetadata& meta);
RmdpAbstraction abstraction_from_json(const json& j, const Partition& p);

/// {ap, states, initial, accepting, delta} with delta[z][symbol].
json dfa_to_json(const ltlf::Dfa& d);
ltlf::Dfa dfa_from_json(const json& j);

/// {dfa_states, iterations, residual, converged, states: [{q, z, p_lower, p_upper, action}]}
json bounds_to_json(const ProductRmdp& prod, const ValueBounds& bounds, const Strategy& strategy);
void bounds_from_json(const json& j, const ProductRmdp& prod, ValueBounds& bounds, Strategy& strategy);
/// q,z,p_lower,p_upper,action for every product state.
void write_bounds_csv(std::ostream& out, const ProductRmdp& prod, const ValueBounds& bounds, const Strategy& strategy);
/// cell_index,x_center_0..,p_lower,p_upper,action at the memory entered from each cell.
void write_plot_csv(std::ostream& out, const ProductRmdp& prod, const ValueBounds& bounds, const Strategy& strategy);

json report_to_json(const McReport& r);
/// k,x_0..,action,region,z
void write_trajectory_csv(std::ostream& out, const Trajectory& t);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const json& j);
json read_json_file(const std::string& path);

}  // namespace drsyn
