#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace drsyn {

/// Closed real interval with natural-extension arithmetic. Rounding is not
/// directed; callers that need floating-point soundness add their own slack.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    constexpr Interval() = default;
    constexpr Interval(double v) : lo(v), hi(v) {}  // NOLINT(google-explicit-constructor)
    constexpr Interval(double l, double h) : lo(l), hi(h) {}

    double width() const { return hi - lo; }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    bool contains(double v) const { return v >= lo && v <= hi; }
    bool nonnegative() const { return lo >= 0.0; }
    bool nonpositive() const { return hi <= 0.0; }

    Interval& operator+=(const Interval& o) { lo += o.lo; hi += o.hi; return *this; }
    Interval& operator-=(const Interval& o) { lo -= o.hi; hi -= o.lo; return *this; }
};

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }
inline Interval operator+(Interval a, const Interval& b) { return a += b; }
inline Interval operator-(Interval a, const Interval& b) { return a -= b; }
Interval operator*(const Interval& a, const Interval& b);
/// Throws NumericalError when the divisor contains zero.
Interval operator/(const Interval& a, const Interval& b);

Interval sqr(const Interval& a);
Interval sqrt(const Interval& a);
Interval abs(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval hull(const Interval& a, const Interval& b);

/// x |x|, strictly increasing.
inline double signed_square(double x) { return x * std::abs(x); }
inline Interval signed_square(const Interval& a) { return {signed_square(a.lo), signed_square(a.hi)}; }

using IntervalVec = std::vector<Interval>;
/// Row-major rows x cols matrix of intervals.
struct IntervalMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Interval> data;

    IntervalMatrix() = default;
    IntervalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Interval(0.0)) {}
    Interval& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const Interval& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

}  // namespace drsyn
