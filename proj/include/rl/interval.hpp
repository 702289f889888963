#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rl {

// A certified enclosure [lo, hi] of a scalar, optionally carrying the
// parameter pair that witnesses the extremal value (s on curve A, t on B).
struct IntervalValue {
    double lo = 0.0;
    double hi = 0.0;
    bool has_witness = false;
    double witness_s = 0.0;
    double witness_t = 0.0;

    IntervalValue() = default;
    IntervalValue(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo <= hi)) throw std::invalid_argument("IntervalValue: lo > hi");
    }

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }
    bool overlaps(const IntervalValue& o) const { return lo <= o.hi && o.lo <= hi; }

    IntervalValue with_witness(double s, double t) const {
        IntervalValue r = *this;
        r.has_witness = true;
        r.witness_s = s;
        r.witness_t = t;
        return r;
    }
};

// Outward-rounded helpers. A couple of ulps of slack keeps the enclosures
// honest without tracking rounding modes.
inline double down(double v) { return std::nextafter(std::nextafter(v, -INFINITY), -INFINITY); }
inline double up(double v) { return std::nextafter(std::nextafter(v, INFINITY), INFINITY); }

inline IntervalValue exact_interval(double v) { return {down(v), up(v)}; }

inline IntervalValue operator+(const IntervalValue& a, const IntervalValue& b) {
    return {down(a.lo + b.lo), up(a.hi + b.hi)};
}

inline IntervalValue scale_interval(const IntervalValue& a, double s) {
    if (s >= 0) return {down(a.lo * s), up(a.hi * s)};
    return {down(a.hi * s), up(a.lo * s)};
}

}  // namespace rl
