#include "drsyn/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "drsyn/error.hpp"

namespace drsyn {

void SystemModel::validate() const {
    if (state_dim == 0 || noise_dim == 0) throw InvalidInput("system '" + name + "': dimensions must be >= 1");
    if (modes.empty()) throw InvalidInput("system '" + name + "': at least one mode is required");
    if (noise_support.dim() != noise_dim) throw InvalidInput("system '" + name + "': noise support dimension mismatch");
    if (!step_fn || !reach_fn || !lipschitz_fn)
        throw InvalidInput("system '" + name + "': step, reach and lipschitz callbacks are required");
}

namespace {

IntervalVec to_intervals(const Box& b) {
    IntervalVec v(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) v[i] = Interval(b.lower[i], b.upper[i]);
    return v;
}

bool signed_definite(const Interval& iv) { return iv.nonnegative() || iv.nonpositive(); }

}  // namespace

Box monotone_reach(const SystemModel::StepFn& step_fn, const IntervalExtension& ext, const Box& cell, std::size_t a,
                   const Box& noise) {
    const IntervalVec xs = to_intervals(cell);
    const IntervalVec ws = to_intervals(noise);
    const IntervalVec natural = ext.eval(xs, a, ws);
    const std::size_t n = natural.size();
    Box out;
    out.lower.resize(n);
    out.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.lower[i] = natural[i].lo;
        out.upper[i] = natural[i].hi;
    }
    if (!ext.jac_x || !ext.jac_w) return out;

    const IntervalMatrix jx = ext.jac_x(xs, a, ws);
    const IntervalMatrix jw = ext.jac_w(xs, a, ws);
    Vec x_lo(cell.dim()), x_hi(cell.dim()), w_lo(noise.dim()), w_hi(noise.dim());
    for (std::size_t i = 0; i < n; ++i) {
        bool certified = true;
        for (std::size_t j = 0; j < cell.dim() && certified; ++j) certified = signed_definite(jx(i, j));
        for (std::size_t k = 0; k < noise.dim() && certified; ++k) certified = signed_definite(jw(i, k));
        if (!certified) continue;
        // Minimizing corner takes the lower end of every nondecreasing argument.
        for (std::size_t j = 0; j < cell.dim(); ++j) {
            const bool inc = jx(i, j).nonnegative();
            x_lo[j] = inc ? cell.lower[j] : cell.upper[j];
            x_hi[j] = inc ? cell.upper[j] : cell.lower[j];
        }
        for (std::size_t k = 0; k < noise.dim(); ++k) {
            const bool inc = jw(i, k).nonnegative();
            w_lo[k] = inc ? noise.lower[k] : noise.upper[k];
            w_hi[k] = inc ? noise.upper[k] : noise.lower[k];
        }
        const double lo = step_fn(x_lo, a, w_lo)[i];
        const double hi = step_fn(x_hi, a, w_hi)[i];
        out.lower[i] = std::min(lo, hi);
        out.upper[i] = std::max(lo, hi);
    }
    return out;
}

double jacobian_norm_bound(const IntervalMatrix& jw, Norm l) {
    double result = 0.0;
    switch (l) {
        case Norm::Inf:
            for (std::size_t i = 0; i < jw.rows; ++i) {
                double row = 0.0;
                for (std::size_t k = 0; k < jw.cols; ++k) row += jw(i, k).mag();
                result = std::max(result, row);
            }
            break;
        case Norm::One:
            for (std::size_t k = 0; k < jw.cols; ++k) {
                double col = 0.0;
                for (std::size_t i = 0; i < jw.rows; ++i) col += jw(i, k).mag();
                result = std::max(result, col);
            }
            break;
        case Norm::Two: {
            double fro = 0.0;
            for (const auto& e : jw.data) fro += e.mag() * e.mag();
            result = std::sqrt(fro);
            break;
        }
    }
    return result;
}

void attach_interval_extension(SystemModel& m, IntervalExtension ext) {
    auto step_fn = m.step_fn;
    const Box support = m.noise_support;
    m.reach_fn = [step_fn, ext](const Box& cell, std::size_t a, const Box& noise) {
        return monotone_reach(step_fn, ext, cell, a, noise);
    };
    m.lipschitz_fn = [ext, support](const Box& cell, std::size_t a, Norm l) {
        IntervalVec xs(cell.dim()), ws(support.dim());
        for (std::size_t i = 0; i < cell.dim(); ++i) xs[i] = Interval(cell.lower[i], cell.upper[i]);
        for (std::size_t k = 0; k < support.dim(); ++k) ws[k] = Interval(support.lower[k], support.upper[k]);
        return jacobian_norm_bound(ext.jac_w(xs, a, ws), l);
    };
}

// ---------------------------------------------------------------------------

namespace {

void check_mode(const SystemModel& m, std::size_t a) {
    if (a >= m.num_modes())
        throw InvalidInput("system '" + m.name + "': unknown mode " + std::to_string(a));
}

}  // namespace

Vec step(const SystemModel& m, std::span<const double> x, std::size_t a, std::span<const double> w) {
    check_mode(m, a);
    if (x.size() != m.state_dim || w.size() != m.noise_dim) throw InvalidInput("step: dimension mismatch");
    if (!m.noise_support.contains(w)) throw InvalidInput("step: noise outside the support W");
    return m.step_fn(x, a, w);
}

Box reach_over_approx(const SystemModel& m, const Box& cell, std::size_t a, std::span<const double> w) {
    return reach_over_approx(m, cell, a, Box::point(w));
}

Box reach_over_approx(const SystemModel& m, const Box& cell, std::size_t a, const Box& noise) {
    check_mode(m, a);
    return m.reach_fn(cell, a, noise);
}

double lipschitz_cell_bound(const SystemModel& m, const Box& cell, std::size_t a, Norm l) {
    check_mode(m, a);
    return m.lipschitz_fn(cell, a, l);
}

Vec extract_noise(const SystemModel& m, std::span<const double> x, std::size_t a, std::span<const double> x_next) {
    check_mode(m, a);
    if (!m.inverse_fn) throw InvalidInput("system '" + m.name + "' declares no noise inverse (not injective in w)");
    auto w = m.inverse_fn(x, a, x_next);
    if (!w) throw InvalidInput("system '" + m.name + "': f_a(x, .) is not injective at this state");
    constexpr double tol = 1e-9;
    for (std::size_t k = 0; k < w->size(); ++k) {
        if ((*w)[k] < m.noise_support.lower[k] - tol || (*w)[k] > m.noise_support.upper[k] + tol)
            throw InvalidInput("extract_noise: recovered noise lies outside W (inconsistent observation)");
        (*w)[k] = std::clamp((*w)[k], m.noise_support.lower[k], m.noise_support.upper[k]);
    }
    const Vec back = m.step_fn(x, a, *w);
    for (std::size_t i = 0; i < back.size(); ++i) {
        if (std::abs(back[i] - x_next[i]) > tol * std::max(1.0, std::abs(x_next[i])))
            throw InvalidInput("extract_noise: observation is not reachable by any noise value (round trip failed)");
    }
    return *w;
}

}  // namespace drsyn
