#include "drsyn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "drsyn/error.hpp"

namespace drsyn {

Norm parse_norm(const std::string& text) {
    if (text == "1") return Norm::One;
    if (text == "2") return Norm::Two;
    if (text == "inf" || text == "Inf" || text == "infinity") return Norm::Inf;
    throw InvalidInput("unknown norm index '" + text + "' (expected 1, 2 or inf)");
}

std::string to_string(Norm norm) {
    switch (norm) {
        case Norm::One: return "1";
        case Norm::Two: return "2";
        case Norm::Inf: return "inf";
    }
    return "inf";
}

double norm_of(std::span<const double> v, Norm norm) {
    double acc = 0.0;
    switch (norm) {
        case Norm::One:
            for (double x : v) acc += std::abs(x);
            return acc;
        case Norm::Two:
            for (double x : v) acc += x * x;
            return std::sqrt(acc);
        case Norm::Inf:
            for (double x : v) acc = std::max(acc, std::abs(x));
            return acc;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Box

Box::Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.empty()) throw InvalidInput("box must have dimension >= 1");
    if (lower.size() != upper.size()) throw InvalidInput("box lower/upper dimension mismatch");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw InvalidInput("box bounds must be finite");
        if (lower[i] > upper[i]) {
            std::ostringstream os;
            os << "box lower > upper on axis " << i;
            throw InvalidInput(os.str());
        }
    }
}

Box Box::point(std::span<const double> x) {
    Vec v(x.begin(), x.end());
    return Box(v, v);
}

bool Box::contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    return true;
}

bool Box::contains(const Box& other) const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (other.lower[i] < lower[i] || other.upper[i] > upper[i]) return false;
    return true;
}

bool Box::intersects(const Box& other) const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (other.upper[i] < lower[i] || other.lower[i] > upper[i]) return false;
    return true;
}

Vec Box::center() const {
    Vec c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
}

Box Box::inflated(double slack) const {
    Box b = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
        b.lower[i] -= slack;
        b.upper[i] += slack;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(Box domain, std::vector<int> cuts) : domain_(std::move(domain)), cuts_(std::move(cuts)) {
    strides_.resize(cuts_.size());
    std::size_t stride = 1;
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
        strides_[i] = stride;
        stride *= static_cast<std::size_t>(cuts_[i]);
    }
    num_cells_ = stride;
}

Partition Partition::grid(Box domain, std::vector<int> cuts) {
    if (domain.dim() == 0) throw InvalidInput("partition domain must have dimension >= 1");
    if (cuts.size() != domain.dim()) throw InvalidInput("cuts_per_axis length must equal the domain dimension");
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i] < 1) {
            std::ostringstream os;
            os << "cut count on axis " << i << " must be >= 1 (got " << cuts[i] << ")";
            throw InvalidInput(os.str());
        }
        if (!(domain.width(i) > 0.0)) {
            std::ostringstream os;
            os << "degenerate domain: zero width on axis " << i;
            throw InvalidInput(os.str());
        }
    }
    return Partition(std::move(domain), std::move(cuts));
}

double Partition::grid_line(std::size_t axis, int k) const {
    if (k <= 0) return domain_.lower[axis];
    if (k >= cuts_[axis]) return domain_.upper[axis];
    return domain_.lower[axis] + domain_.width(axis) * static_cast<double>(k) / static_cast<double>(cuts_[axis]);
}

double Partition::cell_width(std::size_t axis) const { return domain_.width(axis) / cuts_[axis]; }

std::vector<int> Partition::coords(StateId q) const {
    if (q >= num_cells_) throw InvalidInput("state id " + std::to_string(q) + " is not a safe cell");
    std::vector<int> c(cuts_.size());
    for (std::size_t i = 0; i < cuts_.size(); ++i) {
        c[i] = static_cast<int>(q % static_cast<std::size_t>(cuts_[i]));
        q /= static_cast<std::size_t>(cuts_[i]);
    }
    return c;
}

StateId Partition::index(std::span<const int> c) const {
    StateId q = 0;
    for (std::size_t i = 0; i < cuts_.size(); ++i) q += static_cast<std::size_t>(c[i]) * strides_[i];
    return q;
}

Box Partition::cell(StateId q) const {
    auto c = coords(q);
    Box b;
    b.lower.resize(dim());
    b.upper.resize(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        b.lower[i] = grid_line(i, c[i]);
        b.upper[i] = grid_line(i, c[i] + 1);
    }
    return b;
}

StateId Partition::locate(std::span<const double> x) const {
    if (x.size() != dim()) throw InvalidInput("locate: state dimension mismatch");
    for (double v : x)
        if (std::isnan(v)) throw InvalidInput("locate: NaN coordinate");
    if (!domain_.contains(x)) return unsafe_id();
    StateId q = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const int n = cuts_[i];
        int k = static_cast<int>(std::floor((x[i] - domain_.lower[i]) / domain_.width(i) * n));
        k = std::clamp(k, 0, n - 1);
        // Snap to the exact grid lines so locate agrees with cell().
        while (k > 0 && x[i] < grid_line(i, k)) --k;
        while (k < n - 1 && x[i] >= grid_line(i, k + 1)) ++k;
        q += static_cast<std::size_t>(k) * strides_[i];
    }
    return q;
}

bool Partition::overlapping_range(const Box& box, std::vector<int>& first, std::vector<int>& last) const {
    first.assign(dim(), 0);
    last.assign(dim(), 0);
    for (std::size_t i = 0; i < dim(); ++i) {
        const double lo = std::max(box.lower[i], domain_.lower[i]);
        const double hi = std::min(box.upper[i], domain_.upper[i]);
        if (lo > hi) return false;
        const int n = cuts_[i];
        int a = std::clamp(static_cast<int>(std::floor((lo - domain_.lower[i]) / domain_.width(i) * n)), 0, n - 1);
        int b = std::clamp(static_cast<int>(std::floor((hi - domain_.lower[i]) / domain_.width(i) * n)), 0, n - 1);
        // Closed cells: a cell [l_k, l_{k+1}] meets [lo, hi] iff l_k <= hi and l_{k+1} >= lo.
        while (a > 0 && grid_line(i, a) >= lo) --a;
        while (a < n - 1 && grid_line(i, a + 1) < lo) ++a;
        while (b < n - 1 && grid_line(i, b + 1) <= hi) ++b;
        while (b > 0 && grid_line(i, b) > hi) --b;
        first[i] = a;
        last[i] = b;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Costs

namespace {

double powi(double base, int s) {
    double r = 1.0;
    for (int i = 0; i < s; ++i) r *= base;
    return r;
}

}  // namespace

double cell_cost_coords(const Partition& p, std::span<const int> a, std::span<const int> b, Norm l, int s) {
    double gaps[16];
    std::vector<double> heap;
    double* g = gaps;
    if (p.dim() > 16) {
        heap.resize(p.dim());
        g = heap.data();
    }
    for (std::size_t i = 0; i < p.dim(); ++i) {
        const int lo = std::min(a[i], b[i]);
        const int hi = std::max(a[i], b[i]);
        g[i] = hi - lo > 1 ? p.grid_line(i, hi) - p.grid_line(i, lo + 1) : 0.0;
    }
    return powi(norm_of(std::span<const double>(g, p.dim()), l), s);
}

double cell_cost_to_exterior(const Partition& p, std::span<const int> a, int s) {
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.dim(); ++i) {
        slack = std::min(slack, p.grid_line(i, a[i]) - p.domain().lower[i]);
        slack = std::min(slack, p.domain().upper[i] - p.grid_line(i, a[i] + 1));
    }
    return powi(std::max(0.0, slack), s);
}

double cell_cost(const Partition& p, StateId q, StateId q2, Norm l, int s) {
    if (s < 1) throw InvalidInput("cell_cost: order s must be >= 1");
    if (q >= p.num_states() || q2 >= p.num_states())
        throw InvalidInput("cell_cost: unknown state id");
    if (q == q2) return 0.0;
    if (p.is_unsafe(q)) std::swap(q, q2);
    if (p.is_unsafe(q2)) return cell_cost_to_exterior(p, p.coords(q), s);
    auto a = p.coords(q);
    auto b = p.coords(q2);
    return cell_cost_coords(p, a, b, l, s);
}

// ---------------------------------------------------------------------------
// Labels

LabelMap::LabelMap(std::vector<std::string> propositions, std::vector<RegionDef> regions,
                   std::vector<std::vector<int>> cell_labels)
    : propositions_(std::move(propositions)), regions_(std::move(regions)), cell_labels_(std::move(cell_labels)) {}

int LabelMap::find(const std::string& name) const {
    auto it = std::find(propositions_.begin(), propositions_.end(), name);
    return it == propositions_.end() ? -1 : static_cast<int>(it - propositions_.begin());
}

namespace {

// Index k with |grid_line(k) - v| <= tol, or -1.
int snap_to_grid(const Partition& p, std::size_t axis, double v) {
    const double rel = (v - p.domain().lower[axis]) / p.cell_width(axis);
    const int k = static_cast<int>(std::lround(rel));
    if (k < 0 || k > p.cuts()[axis]) return -1;
    return std::abs(p.grid_line(axis, k) - v) <= kRegionAlignTol ? k : -1;
}

}  // namespace

LabelMap attach_labels(const Partition& p, const std::vector<RegionDef>& regions) {
    std::vector<std::string> props;
    for (const auto& r : regions) {
        if (r.name.empty()) throw InvalidInput("region name must not be empty");
        if (r.name == kUnsafeProposition)
            throw InvalidInput("region name 'unsafe' is reserved for the domain complement");
        if (std::find(props.begin(), props.end(), r.name) == props.end()) props.push_back(r.name);
    }
    props.push_back(kUnsafeProposition);

    std::vector<std::vector<int>> labels(p.num_states());
    for (const auto& r : regions) {
        if (r.box.dim() != p.dim())
            throw InvalidInput("region '" + r.name + "' has the wrong dimension");
        std::vector<int> lo(p.dim()), hi(p.dim());
        for (std::size_t i = 0; i < p.dim(); ++i) {
            lo[i] = snap_to_grid(p, i, r.box.lower[i]);
            hi[i] = snap_to_grid(p, i, r.box.upper[i]);
            const bool inside = r.box.lower[i] >= p.domain().lower[i] - kRegionAlignTol &&
                                r.box.upper[i] <= p.domain().upper[i] + kRegionAlignTol;
            if (!inside)
                throw InvalidInput("region '" + r.name + "' is not within the domain on axis " + std::to_string(i));
            if (lo[i] < 0 || hi[i] < 0)
                throw InvalidInput("region '" + r.name + "' misaligned on axis " + std::to_string(i));
        }
        const int prop = static_cast<int>(std::find(props.begin(), props.end(), r.name) - props.begin());
        // Empty (zero-width) regions contain no cell.
        bool empty = false;
        for (std::size_t i = 0; i < p.dim(); ++i) empty |= hi[i] <= lo[i];
        if (empty) continue;
        std::vector<int> c = lo;
        while (true) {
            labels[p.index(c)].push_back(prop);
            std::size_t i = 0;
            for (; i < p.dim(); ++i) {
                if (++c[i] < hi[i]) break;
                c[i] = lo[i];
            }
            if (i == p.dim()) break;
        }
    }
    for (auto& l : labels) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    labels[p.unsafe_id()] = {static_cast<int>(props.size()) - 1};
    return LabelMap(std::move(props), regions, std::move(labels));
}

}  // namespace drsyn
