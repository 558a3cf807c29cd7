#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <type_traits>
#include <vector>

#include "lppgap/model.hpp"

// Dynamic programs over antidiagonals of a lattice field.  A cell (i, j) is
// addressed by its space-time position (x, t) = (j - i, i + j); both
// predecessors of (x, t) lie at time t - 1, at x - 1 and x + 1.
namespace lppgap::lattice {

struct Band {
    int lo = 0, hi = -2;  // positions lo, lo+2, ..., hi
    int size() const { return hi < lo ? 0 : (hi - lo) / 2 + 1; }
    bool contains(int x) const { return x >= lo && x <= hi && ((x - lo) & 1) == 0; }
    int index(int x) const { return (x - lo) / 2; }
    int pos(int k) const { return lo + 2 * k; }
};

inline Band field_band(const LatticeField& f, int t) {
    const int imin = std::max(0, t - (f.cols - 1)), imax = std::min(f.rows - 1, t);
    if (imin > imax) return {};
    return {t - 2 * imax, t - 2 * imin};
}

inline Band intersect(Band b, int lo, int hi) {
    // Snap the bounds to the band's parity.
    if (lo > b.lo) b.lo += ((lo - b.lo + 1) / 2) * 2;
    if (hi < b.hi) b.hi -= ((b.hi - hi + 1) / 2) * 2;
    return b;
}

inline double weight(const LatticeField& f, int x, int t) { return f.at((t - x) / 2, (t + x) / 2); }

inline bool is_cell(const LatticeField& f, int x, int t) {
    return ((t - x) & 1) == 0 && f.inside((t - x) / 2, (t + x) / 2);
}

inline constexpr Value neg_inf = -std::numeric_limits<Value>::infinity();

// Single-path values on a range of antidiagonals.
struct DiagTable {
    int t0 = 0, t1 = 0;
    std::vector<Band> bands;
    std::vector<std::vector<Value>> vals;

    bool has(int x, int t) const {
        return t >= t0 && t <= t1 && bands[t - t0].contains(x) && vals[t - t0][bands[t - t0].index(x)] > neg_inf;
    }
    Value at(int x, int t) const {
        if (!has(x, t)) return neg_inf;
        return vals[t - t0][bands[t - t0].index(x)];
    }
};

// L((x0, t0) -> (x, t)) for t0 <= t <= t1, optionally pruned to cells that can
// still reach positions [lo1, hi1] at time t1.
inline DiagTable forward_table(const LatticeField& f, int x0, int t0, int t1,
                               int lo1 = std::numeric_limits<int>::min() / 4,
                               int hi1 = std::numeric_limits<int>::max() / 4) {
    if (!is_cell(f, x0, t0)) throw domain_error("source is not a cell of the field");
    DiagTable tab;
    tab.t0 = t0;
    tab.t1 = t1;
    for (int t = t0; t <= t1; ++t) {
        const int d = t - t0, r = t1 - t;
        Band b = intersect(field_band(f, t), std::max(x0 - d, lo1 - r), std::min(x0 + d, hi1 + r));
        tab.bands.push_back(b);
        std::vector<Value> v(std::size_t(std::max(0, b.size())), neg_inf);
        if (t == t0) {
            if (b.contains(x0)) v[b.index(x0)] = weight(f, x0, t0);
        } else {
            const Band& pb = tab.bands[d - 1];
            const auto& pv = tab.vals[d - 1];
            for (int k = 0; k < b.size(); ++k) {
                const int x = b.pos(k);
                Value best = neg_inf;
                if (pb.contains(x - 1)) best = std::max(best, pv[pb.index(x - 1)]);
                if (pb.contains(x + 1)) best = std::max(best, pv[pb.index(x + 1)]);
                if (best > neg_inf) v[k] = best + weight(f, x, t);
            }
        }
        tab.vals.push_back(std::move(v));
    }
    return tab;
}

// L((x, t) -> (y1, t1)) for t0 <= t <= t1, optionally pruned to cells reachable
// from positions [lo0, hi0] at time t0.
inline DiagTable backward_table(const LatticeField& f, int y1, int t1, int t0,
                                int lo0 = std::numeric_limits<int>::min() / 4,
                                int hi0 = std::numeric_limits<int>::max() / 4) {
    if (!is_cell(f, y1, t1)) throw domain_error("target is not a cell of the field");
    DiagTable tab;
    tab.t0 = t0;
    tab.t1 = t1;
    tab.bands.resize(std::size_t(t1 - t0 + 1));
    tab.vals.resize(std::size_t(t1 - t0 + 1));
    for (int t = t1; t >= t0; --t) {
        const int d = t1 - t, r = t - t0;
        Band b = intersect(field_band(f, t), std::max(y1 - d, lo0 - r), std::min(y1 + d, hi0 + r));
        std::vector<Value> v(std::size_t(std::max(0, b.size())), neg_inf);
        if (t == t1) {
            if (b.contains(y1)) v[b.index(y1)] = weight(f, y1, t1);
        } else {
            const Band& nb = tab.bands[t + 1 - t0];
            const auto& nv = tab.vals[t + 1 - t0];
            for (int k = 0; k < b.size(); ++k) {
                const int x = b.pos(k);
                Value best = neg_inf;
                if (nb.contains(x - 1)) best = std::max(best, nv[nb.index(x - 1)]);
                if (nb.contains(x + 1)) best = std::max(best, nv[nb.index(x + 1)]);
                if (best > neg_inf) v[k] = best + weight(f, x, t);
            }
        }
        tab.bands[t - t0] = b;
        tab.vals[t - t0] = std::move(v);
    }
    return tab;
}

// Extremal geodesic from the source of a forward table to (y, t1), traced
// backwards: positions indexed by time t0..t1.
inline std::vector<int> trace_back(const LatticeField& f, const DiagTable& fw, int y, int t1, bool rightmost) {
    std::vector<int> xs(std::size_t(t1 - fw.t0 + 1));
    int x = y;
    xs.back() = x;
    for (int t = t1; t > fw.t0; --t) {
        const Value need = fw.at(x, t) - weight(f, x, t);
        const int c1 = rightmost ? x + 1 : x - 1, c2 = rightmost ? x - 1 : x + 1;
        if (fw.has(c1, t - 1) && value_eq(fw.at(c1, t - 1), need)) x = c1;
        else x = c2;
        xs[t - 1 - fw.t0] = x;
    }
    return xs;
}

// Extremal geodesic from (x0, t0) to the target of a backward table, traced
// forwards: positions indexed by time t0..t1.
inline std::vector<int> trace_forward(const LatticeField& f, const DiagTable& bw, int x0, int t0, bool rightmost) {
    std::vector<int> xs(std::size_t(bw.t1 - t0 + 1));
    int x = x0;
    xs[0] = x;
    for (int t = t0; t < bw.t1; ++t) {
        const Value need = bw.at(x, t) - weight(f, x, t);
        const int c1 = rightmost ? x + 1 : x - 1, c2 = rightmost ? x - 1 : x + 1;
        if (bw.has(c1, t + 1) && value_eq(bw.at(c1, t + 1), need)) x = c1;
        else x = c2;
        xs[t + 1 - t0] = x;
    }
    return xs;
}

// ---------------------------------------------------------------- two paths

template <class V>
constexpr V pair_neg() {
    if constexpr (std::is_floating_point_v<V>) return -std::numeric_limits<V>::infinity();
    else return std::numeric_limits<V>::min() / 2;
}

// Values of the best pair of interior-disjoint paths ending at positions
// (a, b), a < b, on one antidiagonal.  Stored densely with a one-cell border.
template <class V>
struct PairTable {
    int t = 0;
    Band band;
    int m = 0;
    std::vector<V> v;  // (m + 2) x (m + 2), entry (a + 1, b + 1)

    V get(int a, int b) const { return v[std::size_t(a + 1) * (m + 2) + (b + 1)]; }
    V* row(int a) { return v.data() + std::size_t(a + 1) * (m + 2) + 1; }
    const V* row(int a) const { return v.data() + std::size_t(a + 1) * (m + 2) + 1; }
    bool valid(V x) const { return x > pair_neg<V>() / 2; }

    std::optional<Value> at(int xa, int xb) const {
        if (!(xa < xb) || !band.contains(xa) || !band.contains(xb)) return std::nullopt;
        const V x = get(band.index(xa), band.index(xb));
        if (!valid(x)) return std::nullopt;
        return Value(x);
    }
};

struct TwoPathSpec {
    int t0 = 0;
    int xa = 0, xb = 0;  // start positions at t0; equal means a doubled start
    int t_end = 0;
    int lo_end = 0, hi_end = 0;  // window of interest at t_end
};

// Runs the two-path recursion from the start pair up to t_end, calling
// step(table) after each antidiagonal.  For a doubled start the first table
// is at t0 + 1, where the paths occupy x0 - 1 and x0 + 1.
template <class V, class Step>
void two_path_sweep(const LatticeField& f, const TwoPathSpec& s, Step&& step) {
    const bool dbl = s.xa == s.xb;
    const int first = dbl ? s.t0 + 1 : s.t0;
    if (s.t_end < first) return;
    constexpr V NEG = pair_neg<V>();
    auto band_at = [&](int t) {
        const int d = t - s.t0, r = s.t_end - t;
        return intersect(field_band(f, t), std::max(s.xa - d, s.lo_end - r), std::min(s.xb + d, s.hi_end + r));
    };
    auto wcol = [&](const Band& b, int t) {
        std::vector<V> w(std::size_t(std::max(0, b.size())));
        for (int k = 0; k < b.size(); ++k) w[k] = V(weight(f, b.pos(k), t));
        return w;
    };
    PairTable<V> cur;
    cur.t = first;
    cur.band = band_at(first);
    cur.m = std::max(0, cur.band.size());
    cur.v.assign(std::size_t(cur.m + 2) * (cur.m + 2), NEG);
    if (dbl) {
        const int a = s.xa - 1, b = s.xa + 1;
        if (is_cell(f, s.xa, s.t0) && cur.band.contains(a) && cur.band.contains(b))
            cur.row(cur.band.index(a))[cur.band.index(b)] =
                V(2 * weight(f, s.xa, s.t0) + weight(f, a, first) + weight(f, b, first));
    } else if (s.xa < s.xb && cur.band.contains(s.xa) && cur.band.contains(s.xb)) {
        cur.row(cur.band.index(s.xa))[cur.band.index(s.xb)] = V(weight(f, s.xa, s.t0) + weight(f, s.xb, s.t0));
    }
    step(static_cast<const PairTable<V>&>(cur));
    PairTable<V> nxt;
    for (int t = first + 1; t <= s.t_end; ++t) {
        nxt.t = t;
        nxt.band = band_at(t);
        nxt.m = std::max(0, nxt.band.size());
        nxt.v.assign(std::size_t(nxt.m + 2) * (nxt.m + 2), NEG);
        const auto w = wcol(nxt.band, t);
        // Predecessor index of position x - 1 in the previous band.
        const int off = (nxt.band.lo - 1 - cur.band.lo) / 2;
        const int m = nxt.m;
        const int stride = cur.m + 2;
        for (int a = 0; a + 1 < m; ++a) {
            const int pa = a + off;  // in [-1, cur.m - 1]
            const V* r0 = cur.v.data() + std::size_t(pa + 1) * stride + 1;
            const V* r1 = r0 + stride;
            V* out = nxt.row(a);
            const V wa = w[a];
            for (int b = a + 1; b < m; ++b) {
                const int pb = b + off;
                V best = std::max(std::max(r0[pb], r0[pb + 1]), std::max(r1[pb], r1[pb + 1]));
                out[b] = best + wa + w[b];
            }
        }
        std::swap(cur, nxt);
        step(static_cast<const PairTable<V>&>(cur));
    }
}

// True when the int32 kernel is exact for this field over paths of the given length.
inline bool int_kernel_ok(const LatticeField& f, int steps) {
    if (!f.integer_valued()) return false;
    double mx = 0;
    for (double w : f.weights) mx = std::max(mx, w);
    return 2.0 * (steps + 2) * mx < 5e8;
}

}  // namespace lppgap::lattice
