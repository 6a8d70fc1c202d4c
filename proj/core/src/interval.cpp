#include "drsyn/interval.hpp"

#include <numbers>

#include "drsyn/error.hpp"

namespace drsyn {

Interval operator*(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

Interval operator/(const Interval& a, const Interval& b) {
    if (b.lo <= 0.0 && b.hi >= 0.0) throw NumericalError("interval division by an interval containing zero");
    return a * Interval(1.0 / b.hi, 1.0 / b.lo);
}

Interval sqr(const Interval& a) {
    if (a.lo >= 0.0) return {a.lo * a.lo, a.hi * a.hi};
    if (a.hi <= 0.0) return {a.hi * a.hi, a.lo * a.lo};
    return {0.0, std::max(a.lo * a.lo, a.hi * a.hi)};
}

Interval sqrt(const Interval& a) {
    if (a.lo < 0.0) throw NumericalError("interval sqrt of a negative range");
    return {std::sqrt(a.lo), std::sqrt(a.hi)};
}

Interval abs(const Interval& a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return -a;
    return {0.0, std::max(-a.lo, a.hi)};
}

Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Interval sin(const Interval& a) {
    constexpr double pi = std::numbers::pi;
    if (a.width() >= 2.0 * pi) return {-1.0, 1.0};
    double lo = std::min(std::sin(a.lo), std::sin(a.hi));
    double hi = std::max(std::sin(a.lo), std::sin(a.hi));
    // Extrema at pi/2 + 2k pi (max) and -pi/2 + 2k pi (min).
    const double k_max = std::ceil((a.lo - pi / 2) / (2 * pi));
    if (pi / 2 + 2 * pi * k_max <= a.hi) hi = 1.0;
    const double k_min = std::ceil((a.lo + pi / 2) / (2 * pi));
    if (-pi / 2 + 2 * pi * k_min <= a.hi) lo = -1.0;
    return {lo, hi};
}

Interval cos(const Interval& a) {
    constexpr double pi = std::numbers::pi;
    if (a.width() >= 2.0 * pi) return {-1.0, 1.0};
    double lo = std::min(std::cos(a.lo), std::cos(a.hi));
    double hi = std::max(std::cos(a.lo), std::cos(a.hi));
    // Maxima at 2k pi, minima at pi + 2k pi.
    if (2 * pi * std::ceil(a.lo / (2 * pi)) <= a.hi) hi = 1.0;
    if (pi + 2 * pi * std::ceil((a.lo - pi) / (2 * pi)) <= a.hi) lo = -1.0;
    return {lo, hi};
}

}  // namespace drsyn
