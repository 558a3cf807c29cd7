#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace lppgap {

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Passage values.  Integer-weight models produce integers, which doubles
// represent exactly far beyond any size used here.
using Value = double;

inline bool value_eq(Value a, Value b) {
    return std::fabs(a - b) <= 1e-9 * (1.0 + std::fabs(a) + std::fabs(b));
}

struct SpaceTimePoint {
    double x = 0.0;
    double t = 0.0;
    friend bool operator==(const SpaceTimePoint&, const SpaceTimePoint&) = default;
};

// Order used to sort clouds: by time, then space.
inline bool time_order(const SpaceTimePoint& a, const SpaceTimePoint& b) {
    return a.t < b.t || (a.t == b.t && a.x < b.x);
}

struct OrderedQuad {
    SpaceTimePoint start;
    SpaceTimePoint end;
};

inline OrderedQuad make_quad(SpaceTimePoint start, SpaceTimePoint end) {
    if (!(std::isfinite(start.x) && std::isfinite(start.t) && std::isfinite(end.x) &&
          std::isfinite(end.t)))
        throw parameter_error("quad coordinates must be finite");
    if (!(start.t < end.t)) throw parameter_error("quad requires start.t < end.t");
    return {start, end};
}

inline bool causal_leq(const SpaceTimePoint& p, const SpaceTimePoint& q) {
    return q.t >= p.t && std::fabs(q.x - p.x) <= q.t - p.t;
}

struct GridPoint {
    double u = 0.0;
    double v = 0.0;
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

inline GridPoint rotate45(const SpaceTimePoint& p) { return {p.t + p.x, p.t - p.x}; }

inline SpaceTimePoint unrotate45(const GridPoint& g) {
    return {(g.u - g.v) / 2.0, (g.u + g.v) / 2.0};
}

struct ScalingFrame {
    double n = 1.0;

    explicit ScalingFrame(double n_ = 1.0) : n(n_) {
        if (!(n > 0.0) || !std::isfinite(n)) throw parameter_error("scaling frame needs n > 0");
    }
    double spatial_unit() const { return std::pow(n, 2.0 / 3.0); }
    double fluctuation_unit() const { return std::cbrt(n); }
};

// (v - 2n(t-s)) / n^{1/3}, with s,t the rescaled times of the centering quad.
inline double rescale_value(double v, const ScalingFrame& f, const OrderedQuad& centering) {
    return (v - 2.0 * f.n * (centering.end.t - centering.start.t)) / f.fluctuation_unit();
}

inline double rescale_x(double x, const ScalingFrame& f) { return x / f.spatial_unit(); }

// Raw space-time point to rescaled coordinates (x / n^{2/3}, t / n).
inline SpaceTimePoint rescale_point(const SpaceTimePoint& p, const ScalingFrame& f) {
    return {p.x / f.spatial_unit(), p.t / f.n};
}

}  // namespace lppgap
