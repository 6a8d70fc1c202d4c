#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace drsyn {

using StateId = std::size_t;
using Vec = std::vector<double>;

/// Norm index l of the l-norm used for transport costs and Lipschitz bounds.
enum class Norm { One, Two, Inf };

Norm parse_norm(const std::string& text);
std::string to_string(Norm norm);
double norm_of(std::span<const double> v, Norm norm);

/// Axis-aligned closed box [lower, upper] in R^n.
struct Box {
    Vec lower;
    Vec upper;

    Box() = default;
    /// Validates dimensions and ordering; throws InvalidInput.
    Box(Vec lo, Vec hi);
    static Box point(std::span<const double> x);

    std::size_t dim() const { return lower.size(); }
    double width(std::size_t axis) const { return upper[axis] - lower[axis]; }
    bool contains(std::span<const double> x) const;
    bool contains(const Box& other) const;
    bool intersects(const Box& other) const;
    Vec center() const;
    /// Grow every face outward by `slack`.
    Box inflated(double slack) const;

    friend bool operator==(const Box&, const Box&) = default;
};

/// Uniform axis-aligned grid over a domain box plus the unsafe complement
/// state. Cells are indexed with axis 0 varying fastest; the unsafe state is
/// the last index.
class Partition {
public:
    Partition() = default;

    /// Uniform grid with `cuts[i]` cells along axis i.
    static Partition grid(Box domain, std::vector<int> cuts);

    const Box& domain() const { return domain_; }
    const std::vector<int>& cuts() const { return cuts_; }
    std::size_t dim() const { return cuts_.size(); }
    std::size_t num_cells() const { return num_cells_; }
    std::size_t num_states() const { return num_cells_ + 1; }
    StateId unsafe_id() const { return num_cells_; }
    bool is_unsafe(StateId q) const { return q == num_cells_; }

    /// Coordinate of the k-th grid line on `axis`, k in [0, cuts[axis]].
    double grid_line(std::size_t axis, int k) const;
    double cell_width(std::size_t axis) const;

    Box cell(StateId q) const;
    std::vector<int> coords(StateId q) const;
    StateId index(std::span<const int> coords) const;

    /// The continuous-to-discrete map: unsafe_id outside the domain, else the
    /// cell containing x under the lower-closed / upper-open convention (the
    /// domain's top faces are closed).
    StateId locate(std::span<const double> x) const;

    /// Inclusive per-axis cell index ranges of cells whose closed box meets
    /// `box`. Returns false when the box misses the domain entirely.
    bool overlapping_range(const Box& box, std::vector<int>& first, std::vector<int>& last) const;

private:
    Partition(Box domain, std::vector<int> cuts);

    Box domain_;
    std::vector<int> cuts_;
    std::vector<std::size_t> strides_;
    std::size_t num_cells_ = 0;
};

/// c(q, q') = inf { ||x - x'||_l^s : x in q, x' in q' }. The unsafe state is
/// the complement of the domain.
double cell_cost(const Partition& p, StateId q, StateId q2, Norm l, int s);

/// Cost between two safe cells given their grid coordinates; no bounds checks.
double cell_cost_coords(const Partition& p, std::span<const int> a, std::span<const int> b, Norm l, int s);

/// Cost from a safe cell to the domain complement.
double cell_cost_to_exterior(const Partition& p, std::span<const int> a, int s);

struct RegionDef {
    std::string name;
    Box box;
};

/// Name of the proposition that holds exactly on the unsafe state.
inline constexpr const char* kUnsafeProposition = "unsafe";

/// Labeling of the abstraction states by atomic propositions.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(std::vector<std::string> propositions, std::vector<RegionDef> regions,
             std::vector<std::vector<int>> cell_labels);

    /// Region names in order of first appearance, followed by "unsafe".
    const std::vector<std::string>& propositions() const { return propositions_; }
    const std::vector<RegionDef>& regions() const { return regions_; }
    /// Sorted proposition indices holding on state q (unsafe state included).
    const std::vector<int>& labels(StateId q) const { return cell_labels_.at(q); }
    int unsafe_proposition() const { return static_cast<int>(propositions_.size()) - 1; }
    int find(const std::string& name) const;
    std::size_t num_states() const { return cell_labels_.size(); }

private:
    std::vector<std::string> propositions_;
    std::vector<RegionDef> regions_;
    std::vector<std::vector<int>> cell_labels_;
};

/// Alignment tolerance for region faces against grid lines.
inline constexpr double kRegionAlignTol = 1e-9;

/// Labels every cell with the propositions whose region contains it. Throws
/// InvalidInput naming the region and axis when a region face is not a grid line.
LabelMap attach_labels(const Partition& p, const std::vector<RegionDef>& regions);

}  // namespace drsyn
