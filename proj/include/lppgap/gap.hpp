#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "lppgap/disjoint.hpp"
#include "lppgap/lattice_dp.hpp"
#include "lppgap/parallel.hpp"

namespace lppgap {

// Marker for values with no feasible disjoint pair.
inline const Value undefined_value = std::numeric_limits<Value>::quiet_NaN();
inline bool is_defined(Value v) { return !std::isnan(v); }

// ---------------------------------------------------------------- one source, many targets

// Passage data from a doubled lattice source (x, t0) to every cell of the
// window [ylo, yhi] at time t1.  pair[a * ys + b] (a < b) holds the best
// disjoint pair from x doubled to the distinct targets ys[a], ys[b].
struct SourceRow {
    int x = 0, t0 = 0, t1 = 0;
    std::vector<int> ys;
    std::vector<Value> L, L2;
    std::vector<Value> pair;

    int index(int y) const {
        auto it = std::lower_bound(ys.begin(), ys.end(), y);
        if (it == ys.end() || *it != y) return -1;
        return int(it - ys.begin());
    }
    Value G(int k) const {
        return is_defined(L[k]) && is_defined(L2[k]) ? 2 * L[k] - L2[k] : undefined_value;
    }
    Value pair_at(int a, int b) const { return pair[std::size_t(a) * ys.size() + b]; }
};

inline SourceRow lattice_source_row(const LatticeField& f, int x, int t0, int t1, int ylo, int yhi,
                                    bool pairs = false) {
    if (!(t1 > t0)) throw parameter_error("target time must follow the source time");
    const auto fw = lattice::forward_table(f, x, t0, t1, ylo, yhi);
    SourceRow row;
    row.x = x;
    row.t0 = t0;
    row.t1 = t1;
    const auto& band = fw.bands.back();
    for (int k = 0; k < band.size(); ++k) row.ys.push_back(band.pos(k));
    const std::size_t m = row.ys.size();
    row.L.assign(m, undefined_value);
    row.L2.assign(m, undefined_value);
    for (std::size_t k = 0; k < m; ++k)
        if (fw.has(row.ys[k], t1)) row.L[k] = fw.at(row.ys[k], t1);
    if (pairs) row.pair.assign(m * m, undefined_value);
    if (t1 == t0 + 1) {
        // Adjacent cells: both paths are the same two cells, sharing only endpoints.
        for (std::size_t k = 0; k < m; ++k)
            if (is_defined(row.L[k])) row.L2[k] = 2 * row.L[k];
    }
    auto collect = [&]<class V>(const lattice::PairTable<V>& tab) {
        if (tab.t == t1 - 1 && t1 - 1 > t0) {
            for (std::size_t k = 0; k < m; ++k) {
                const int y = row.ys[k];
                if (!is_defined(row.L[k])) continue;
                const auto v = tab.at(y - 1, y + 1);
                if (v) row.L2[k] = *v + 2 * lattice::weight(f, y, t1);
            }
        }
        if (pairs && tab.t == t1) {
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = a + 1; b < m; ++b) {
                    const auto v = tab.at(row.ys[a], row.ys[b]);
                    if (v) row.pair[a * m + b] = *v;
                }
        }
    };
    lattice::TwoPathSpec spec{t0, x, x, t1, ylo, yhi};
    if (lattice::int_kernel_ok(f, t1 - t0))
        lattice::two_path_sweep<std::int32_t>(f, spec, collect);
    else
        lattice::two_path_sweep<double>(f, spec, collect);
    return row;
}

// ---------------------------------------------------------------- sheets

struct GapSheet {
    double t0 = 0, t1 = 1;
    std::vector<double> xs, ys;
    std::vector<Value> L, L2, G;  // row-major: row i is source xs[i]
    ScalingFrame frame{1.0};

    std::size_t idx(std::size_t i, std::size_t j) const { return i * ys.size() + j; }
    Value at(std::size_t i, std::size_t j) const { return G[idx(i, j)]; }
    bool defined(std::size_t i, std::size_t j) const { return is_defined(at(i, j)); }
    std::vector<Value> row(std::size_t i) const {
        return {G.begin() + std::ptrdiff_t(idx(i, 0)), G.begin() + std::ptrdiff_t(idx(i, 0) + ys.size())};
    }
    std::vector<Value> col(std::size_t j) const {
        std::vector<Value> out;
        for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(at(i, j));
        return out;
    }
};

// Evenly spaced positions centred at c (lattice positions use spacing >= 2 of
// matching parity).
inline std::vector<double> centered_grid(double c, double spacing, int count) {
    std::vector<double> g;
    const double lo = c - spacing * (count - 1) / 2.0;
    for (int k = 0; k < count; ++k) g.push_back(lo + spacing * k);
    return g;
}

inline GapSheet gap_sheet(const Model& m, const std::vector<double>& xs, const std::vector<double>& ys,
                          double t0, double t1, const ScalingFrame& frame, int threads = 1) {
    if (xs.empty() || ys.empty()) throw parameter_error("sheet grids must be nonempty");
    GapSheet s;
    s.t0 = t0;
    s.t1 = t1;
    s.xs = xs;
    s.ys = ys;
    s.frame = frame;
    const std::size_t nx = xs.size(), ny = ys.size();
    s.L.assign(nx * ny, undefined_value);
    s.L2.assign(nx * ny, undefined_value);
    s.G.assign(nx * ny, undefined_value);
    if (const auto* f = std::get_if<LatticeField>(&m)) {
        const int it0 = int(t0), it1 = int(t1);
        if (double(it0) != t0 || double(it1) != t1) throw domain_error("lattice sheet times must be integers");
        const double ylo = *std::min_element(ys.begin(), ys.end());
        const double yhi = *std::max_element(ys.begin(), ys.end());
        for (double y : ys) f->require_cell({y, t1});
        parallel_for(nx, threads, [&](std::size_t i) {
            f->require_cell({xs[i], t0});
            const auto row = lattice_source_row(*f, int(xs[i]), it0, it1, int(ylo), int(yhi));
            for (std::size_t j = 0; j < ny; ++j) {
                const int k = row.index(int(ys[j]));
                if (k < 0) continue;
                s.L[s.idx(i, j)] = row.L[k];
                s.L2[s.idx(i, j)] = row.L2[k];
                s.G[s.idx(i, j)] = row.G(k);
            }
        });
        return s;
    }
    parallel_for(nx * ny, threads, [&](std::size_t k) {
        const std::size_t i = k / ny, j = k % ny;
        const SpaceTimePoint a{xs[i], t0}, b{ys[j], t1};
        if (!causal_leq(a, b)) return;
        const OrderedQuad q{a, b};
        const Value l = passage_value(m, q);
        const auto l2 = disjoint2_value(m, q);
        s.L[k] = l;
        if (l2) {
            s.L2[k] = *l2;
            s.G[k] = 2 * l - *l2;
        }
    });
    return s;
}

// ---------------------------------------------------------------- plateau minima

enum class MinKind { strict, weak, left_sided, right_sided };

struct PlateauMinimum {
    int lo = 0, hi = 0;  // inclusive index range of a constant run
    MinKind kind = MinKind::strict;
    bool boundary = false;  // the run touches an end of the slice
    friend bool operator==(const PlateauMinimum&, const PlateauMinimum&) = default;
};

// Minima among maximal constant runs.  An interior run is a minimum only when
// both neighbours are larger (strict); with one neighbour smaller it is not a
// minimum at all.  A run touching one end of the slice with a larger inner
// neighbour is a one-sided record named after the missing side; a constant
// slice is a single weak run.  Undefined entries split the slice into
// independent pieces.
inline std::vector<PlateauMinimum> slice_minima(const std::vector<Value>& v) {
    if (v.size() < 3) throw parameter_error("slice needs at least 3 values");
    std::vector<PlateauMinimum> out;
    const int n = int(v.size());
    int k = 0;
    while (k < n) {
        if (!is_defined(v[k])) {
            ++k;
            continue;
        }
        int e = k;
        while (e + 1 < n && v[e + 1] == v[k]) ++e;
        const bool has_l = k > 0 && is_defined(v[k - 1]);
        const bool has_r = e + 1 < n && is_defined(v[e + 1]);
        const bool big_l = has_l && v[k - 1] > v[k];
        const bool big_r = has_r && v[e + 1] > v[k];
        if (has_l && has_r) {
            if (big_l && big_r) out.push_back({k, e, MinKind::strict, false});
        } else if (!has_l && !has_r) {
            out.push_back({k, e, MinKind::weak, true});
        } else if (!has_l && big_r) {
            out.push_back({k, e, MinKind::left_sided, true});
        } else if (!has_r && big_l) {
            out.push_back({k, e, MinKind::right_sided, true});
        }
        k = e + 1;
    }
    return out;
}

// True when index k lies in a strict plateau minimum.
inline bool strict_min_at(const std::vector<Value>& v, int k) {
    for (const auto& pm : slice_minima(v))
        if (pm.kind == MinKind::strict && k >= pm.lo && k <= pm.hi) return true;
    return false;
}

// ---------------------------------------------------------------- zero set

struct ZeroSet {
    std::size_t nx = 0, ny = 0;
    std::vector<std::pair<int, int>> cells;  // (row, col), row-major order
    std::vector<char> mask;

    bool contains(int i, int j) const {
        return i >= 0 && j >= 0 && std::size_t(i) < nx && std::size_t(j) < ny && mask[std::size_t(i) * ny + j];
    }
    std::size_t size() const { return cells.size(); }
};

// Zeros by exact equality; sheets of non-integer models use a 1e-9 tolerance.
inline ZeroSet zero_set(const GapSheet& s, double tol = 0.0) {
    ZeroSet z;
    z.nx = s.xs.size();
    z.ny = s.ys.size();
    z.mask.assign(z.nx * z.ny, 0);
    for (std::size_t i = 0; i < z.nx; ++i)
        for (std::size_t j = 0; j < z.ny; ++j) {
            const Value g = s.at(i, j);
            if (is_defined(g) && std::fabs(g) <= tol) {
                z.mask[i * z.ny + j] = 1;
                z.cells.push_back({int(i), int(j)});
            }
        }
    return z;
}

enum class Quadrant { minus_plus, plus_minus };

// For each radius (grid steps, Chebyshev distance): true when no zero lies in
// the open quadrant at the anchor within that radius.
inline std::vector<bool> quadrant_isolated(const ZeroSet& z, int i, int j, Quadrant q,
                                           const std::vector<int>& radii) {
    if (!z.contains(i, j)) throw domain_error("quadrant anchor is not a zero");
    if (radii.empty()) throw parameter_error("radius schedule is empty");
    const int di = q == Quadrant::minus_plus ? -1 : 1;
    const int dj = -di;
    // Chebyshev distance to the nearest zero in the quadrant.
    int nearest = std::numeric_limits<int>::max();
    const int rmax = *std::max_element(radii.begin(), radii.end());
    for (int a = 1; a <= rmax; ++a)
        for (int b = 1; b <= rmax; ++b)
            if (z.contains(i + di * a, j + dj * b)) nearest = std::min(nearest, std::max(a, b));
    std::vector<bool> out;
    for (int r : radii) out.push_back(nearest > r);
    return out;
}

// Radius schedule: `count` dyadic radii starting at r0 in rescaled units,
// converted to grid steps of the given spacing.
inline std::vector<int> dyadic_radii(double r0, int count, const ScalingFrame& frame, double spacing) {
    std::vector<int> out;
    for (int k = 0; k < count; ++k)
        out.push_back(std::max(1, int(std::ceil(r0 * std::ldexp(1.0, k) * frame.spatial_unit() / spacing))));
    return out;
}

// Fraction of zeros with another zero in the coordinatewise order cone
// (both coordinates >= or both <=) within the given Chebyshev radius.
inline double bowtie_frequency(const ZeroSet& z, int radius) {
    if (z.cells.empty()) return 0.0;
    std::size_t hits = 0;
    for (auto [i, j] : z.cells) {
        bool found = false;
        for (int a = 0; a <= radius && !found; ++a)
            for (int b = 0; b <= radius && !found; ++b) {
                if (a == 0 && b == 0) continue;
                found = z.contains(i + a, j + b) || z.contains(i - a, j - b);
            }
        hits += found;
    }
    return double(hits) / double(z.cells.size());
}

// ---------------------------------------------------------------- min formula

// disjoint2(x^2 -> (y, z)) - [L(x;y) + L(x;z) - min over grid w in [y, z] of G(x, w)],
// with y = row.ys[a], z = row.ys[b] and w over every cell between them.
inline std::optional<Value> min_formula_residual(const SourceRow& row, int a, int b) {
    if (a > b) throw parameter_error("min formula needs y <= z");
    Value gmin = std::numeric_limits<Value>::infinity();
    for (int k = a; k <= b; ++k) {
        const Value g = row.G(k);
        if (!is_defined(g)) return std::nullopt;
        gmin = std::min(gmin, g);
    }
    const Value d2 = a == b ? row.L2[a] : row.pair_at(a, b);
    if (!is_defined(d2)) return std::nullopt;
    return d2 - (row.L[a] + row.L[b] - gmin);
}

// Generic version for any model; w ranges over `ws` (sorted, inside [y, z]).
inline std::optional<Value> min_formula_residual(const Model& m, const SpaceTimePoint& x, double y, double z,
                                                 double t, const std::vector<double>& ws) {
    if (y > z) throw parameter_error("min formula needs y <= z");
    Value gmin = std::numeric_limits<Value>::infinity();
    for (double w : ws) {
        if (w < y || w > z) continue;
        const auto g = gap_value(m, {x, {w, t}});
        if (!g) return std::nullopt;
        gmin = std::min(gmin, *g);
    }
    const auto d2 = disjoint2_value(m, doubled(x), EndpointPair{{y, t}, {z, t}});
    if (!d2) return std::nullopt;
    return *d2 - (passage_value(m, {x, {y, t}}) + passage_value(m, {x, {z, t}}) - gmin);
}

}  // namespace lppgap
