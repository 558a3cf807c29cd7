#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "lppgap/geometry.hpp"
#include "lppgap/model.hpp"

namespace lppgap {

enum class Side { left, right };

struct Chain {
    OrderedQuad quad;
    std::vector<SpaceTimePoint> nodes;
    std::vector<std::int64_t> ids;  // lattice: i*cols+j; cloud: point index
    Value value = 0;
    bool anchored = false;          // cloud chains: quad endpoints are weightless anchors
};

// Vertices of the piecewise-linear graph of a chain.
inline std::vector<SpaceTimePoint> chain_polyline(const Chain& c) {
    std::vector<SpaceTimePoint> poly;
    poly.reserve(c.nodes.size() + 2);
    if (c.anchored) poly.push_back(c.quad.start);
    for (const auto& p : c.nodes)
        if (poly.empty() || !(poly.back() == p)) poly.push_back(p);
    if (c.anchored && !(poly.back() == c.quad.end)) poly.push_back(c.quad.end);
    return poly;
}

inline double polyline_x(const std::vector<SpaceTimePoint>& poly, double t) {
    if (t <= poly.front().t) return poly.front().x;
    if (t >= poly.back().t) return poly.back().x;
    auto it = std::lower_bound(poly.begin(), poly.end(), t,
                               [](const SpaceTimePoint& p, double tt) { return p.t < tt; });
    if (it->t == t) return it->x;
    const auto& b = *it;
    const auto& a = *(it - 1);
    return a.x + (t - a.t) * (b.x - a.x) / (b.t - a.t);
}

// ---------------------------------------------------------------- lattice

struct LatticeRect {
    Cell a, b;  // a top-left, b bottom-right
    int height() const { return b.i - a.i + 1; }
    int width() const { return b.j - a.j + 1; }
};

inline LatticeRect lattice_rect(const LatticeField& f, const OrderedQuad& q) {
    const Cell a = f.require_cell(q.start), b = f.require_cell(q.end);
    if (b.i < a.i || b.j < a.j) throw domain_error("endpoints are not causally ordered");
    return {a, b};
}

inline Value lattice_value(const LatticeField& f, Cell a, Cell b) {
    const int w = b.j - a.j + 1;
    std::vector<Value> row(std::size_t(w), 0.0);
    for (int i = a.i; i <= b.i; ++i)
        for (int k = 0; k < w; ++k) {
            const int j = a.j + k;
            Value best;
            if (i == a.i) best = k == 0 ? 0.0 : row[k - 1];
            else best = k == 0 ? row[0] : std::max(row[k], row[k - 1]);
            row[k] = best + f.at(i, j);
        }
    return row[w - 1];
}

// ---------------------------------------------------------------- cloud

inline std::vector<int> diamond_points(const PoissonCloud& c, const SpaceTimePoint& s,
                                       const SpaceTimePoint& e) {
    std::vector<int> idx;
    auto lo = std::lower_bound(c.points.begin(), c.points.end(), s.t,
                               [](const SpaceTimePoint& p, double t) { return p.t < t; });
    for (auto it = lo; it != c.points.end() && it->t <= e.t; ++it)
        if (causal_leq(s, *it) && causal_leq(*it, e)) idx.push_back(int(it - c.points.begin()));
    return idx;
}

// Longest weakly increasing chain (in rotated coordinates) ending at each point.
inline std::vector<int> chain_levels(const std::vector<GridPoint>& g) {
    const std::size_t n = g.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return g[a].u < g[b].u || (g[a].u == g[b].u && g[a].v < g[b].v);
    });
    std::vector<double> vs(n);
    for (std::size_t k = 0; k < n; ++k) vs[k] = g[k].v;
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    std::vector<int> tree(vs.size() + 1, 0), level(n, 0);
    for (int k : order) {
        const int r = int(std::upper_bound(vs.begin(), vs.end(), g[k].v) - vs.begin());
        int best = 0;
        for (int q = r; q > 0; q -= q & -q) best = std::max(best, tree[q]);
        level[k] = best + 1;
        for (int q = r; q <= int(vs.size()); q += q & -q) tree[q] = std::max(tree[q], level[k]);
    }
    return level;
}

inline Value cloud_value(const PoissonCloud& c, const SpaceTimePoint& s, const SpaceTimePoint& e) {
    if (!causal_leq(s, e)) throw domain_error("endpoints are not causally ordered");
    const auto idx = diamond_points(c, s, e);
    std::vector<GridPoint> g;
    g.reserve(idx.size());
    for (int k : idx) g.push_back(rotate45(c.points[k]));
    const auto lv = chain_levels(g);
    return lv.empty() ? 0.0 : Value(*std::max_element(lv.begin(), lv.end()));
}

// ---------------------------------------------------------------- values

inline Value passage_value(const LatticeField& f, const OrderedQuad& q) {
    const auto r = lattice_rect(f, q);
    return lattice_value(f, r.a, r.b);
}

inline Value passage_value(const PoissonCloud& c, const OrderedQuad& q) {
    return cloud_value(c, q.start, q.end);
}

inline Value passage_value(const Model& m, const OrderedQuad& q) {
    return std::visit([&](const auto& v) { return passage_value(v, q); }, m);
}

// Value from a point to another where the endpoints may coincide (a single cell).
inline Value lattice_value_pts(const LatticeField& f, const SpaceTimePoint& s,
                               const SpaceTimePoint& e) {
    const Cell a = f.require_cell(s), b = f.require_cell(e);
    if (b.i < a.i || b.j < a.j) throw domain_error("endpoints are not causally ordered");
    return lattice_value(f, a, b);
}

struct Profile {
    double t = 0.0;
    std::vector<double> xs;
    std::vector<Value> values;
};

// Values from `source` to every cell of antidiagonal t reachable from it.
inline Profile passage_profile(const LatticeField& f, const SpaceTimePoint& source, double t) {
    const Cell a = f.require_cell(source);
    const int tt = int(t);
    if (double(tt) != t || tt < a.i + a.j || tt > f.rows - 1 + f.cols - 1)
        throw domain_error("profile time outside the field");
    const int ib = std::min(f.rows - 1, tt - a.j);
    const int jb = std::min(f.cols - 1, tt - a.i);
    const int w = jb - a.j + 1;
    std::vector<Value> row(std::size_t(w), 0.0);
    Profile out;
    out.t = t;
    for (int i = a.i; i <= ib; ++i)
        for (int k = 0; k < w; ++k) {
            const int j = a.j + k;
            Value best;
            if (i == a.i) best = k == 0 ? 0.0 : row[k - 1];
            else best = k == 0 ? row[0] : std::max(row[k], row[k - 1]);
            row[k] = best + f.at(i, j);
            if (i + j == tt) {
                out.xs.push_back(double(j - i));
                out.values.push_back(row[k]);
            }
        }
    // Cells were visited top row first, i.e. right to left in space.
    std::reverse(out.xs.begin(), out.xs.end());
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

// Values from `source` to (y, t) for each y in xs.
inline Profile passage_profile(const PoissonCloud& c, const SpaceTimePoint& source, double t,
                               const std::vector<double>& xs) {
    if (!(t > source.t)) throw domain_error("profile time must follow the source");
    std::vector<int> idx;
    for (int k = 0; k < int(c.points.size()); ++k)
        if (c.points[k].t <= t && causal_leq(source, c.points[k])) idx.push_back(k);
    std::vector<GridPoint> g;
    for (int k : idx) g.push_back(rotate45(c.points[k]));
    const auto lv = chain_levels(g);
    Profile out;
    out.t = t;
    out.xs = xs;
    for (double y : xs) {
        const SpaceTimePoint e{y, t};
        if (!causal_leq(source, e)) throw domain_error("profile endpoint outside the cone");
        int best = 0;
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (causal_leq(c.points[idx[k]], e)) best = std::max(best, lv[k]);
        out.values.push_back(Value(best));
    }
    return out;
}

// ---------------------------------------------------------------- optimal structure

// All nodes that may lie on a path of the quad, with forward values F (source
// to node, node included), backward values B (node to sink, node included) and
// the optimal edges.
struct PassageField {
    OrderedQuad quad;
    bool anchored = false;
    std::vector<SpaceTimePoint> pos;
    std::vector<Value> w, F, B;
    std::vector<std::int64_t> id;  // -1: start anchor, -2: end anchor
    std::vector<std::vector<int>> opt_succ;
    int source = 0, sink = 0;
    Value opt = 0;

    bool on_opt(int k) const { return value_eq(F[k] + B[k] - w[k], opt); }
    int size() const { return int(pos.size()); }
};

inline PassageField passage_field(const LatticeField& f, const OrderedQuad& q) {
    const auto r = lattice_rect(f, q);
    const int H = r.height(), W = r.width();
    PassageField pf;
    pf.quad = q;
    const std::size_t n = std::size_t(H) * W;
    pf.pos.resize(n);
    pf.w.resize(n);
    pf.F.resize(n);
    pf.B.resize(n);
    pf.id.resize(n);
    pf.opt_succ.assign(n, {});
    auto at = [W](int di, int dj) { return std::size_t(di) * W + dj; };
    for (int di = 0; di < H; ++di)
        for (int dj = 0; dj < W; ++dj) {
            const int i = r.a.i + di, j = r.a.j + dj;
            const auto k = at(di, dj);
            pf.pos[k] = cell_point(i, j);
            pf.w[k] = f.at(i, j);
            pf.id[k] = std::int64_t(i) * f.cols + j;
            Value best = 0;
            if (di > 0 && dj > 0) best = std::max(pf.F[at(di - 1, dj)], pf.F[at(di, dj - 1)]);
            else if (di > 0) best = pf.F[at(di - 1, dj)];
            else if (dj > 0) best = pf.F[at(di, dj - 1)];
            pf.F[k] = best + pf.w[k];
        }
    for (int di = H - 1; di >= 0; --di)
        for (int dj = W - 1; dj >= 0; --dj) {
            const auto k = at(di, dj);
            Value best = 0;
            if (di < H - 1 && dj < W - 1) best = std::max(pf.B[at(di + 1, dj)], pf.B[at(di, dj + 1)]);
            else if (di < H - 1) best = pf.B[at(di + 1, dj)];
            else if (dj < W - 1) best = pf.B[at(di, dj + 1)];
            pf.B[k] = best + pf.w[k];
        }
    pf.source = 0;
    pf.sink = int(n - 1);
    pf.opt = pf.F[n - 1];
    for (int di = 0; di < H; ++di)
        for (int dj = 0; dj < W; ++dj) {
            const auto k = at(di, dj);
            if (!pf.on_opt(int(k))) continue;
            // Down step first: it is the left neighbour.
            if (di + 1 < H) {
                const auto v = at(di + 1, dj);
                if (pf.on_opt(int(v)) && value_eq(pf.F[v], pf.F[k] + pf.w[v])) pf.opt_succ[k].push_back(int(v));
            }
            if (dj + 1 < W) {
                const auto v = at(di, dj + 1);
                if (pf.on_opt(int(v)) && value_eq(pf.F[v], pf.F[k] + pf.w[v])) pf.opt_succ[k].push_back(int(v));
            }
        }
    return pf;
}

inline PassageField passage_field(const PoissonCloud& c, const OrderedQuad& q) {
    if (!causal_leq(q.start, q.end)) throw domain_error("endpoints are not causally ordered");
    const auto idx = diamond_points(c, q.start, q.end);
    const int m = int(idx.size());
    std::vector<GridPoint> g, gr;
    for (int k : idx) {
        const auto p = rotate45(c.points[k]);
        g.push_back(p);
        gr.push_back({-p.u, -p.v});
    }
    const auto fl = chain_levels(g);
    const auto bl = chain_levels(gr);
    PassageField pf;
    pf.quad = q;
    pf.anchored = true;
    const int n = m + 2;
    pf.pos.resize(n);
    pf.w.assign(n, 1.0);
    pf.F.resize(n);
    pf.B.resize(n);
    pf.id.resize(n);
    pf.opt_succ.assign(n, {});
    int opt = 0;
    for (int k = 0; k < m; ++k) opt = std::max(opt, fl[k]);
    pf.pos[0] = q.start;
    pf.w[0] = 0;
    pf.F[0] = 0;
    pf.B[0] = opt;
    pf.id[0] = -1;
    for (int k = 0; k < m; ++k) {
        pf.pos[k + 1] = c.points[idx[k]];
        pf.F[k + 1] = fl[k];
        pf.B[k + 1] = bl[k];
        pf.id[k + 1] = idx[k];
    }
    pf.pos[n - 1] = q.end;
    pf.w[n - 1] = 0;
    pf.F[n - 1] = opt;
    pf.B[n - 1] = 0;
    pf.id[n - 1] = -2;
    pf.source = 0;
    pf.sink = n - 1;
    pf.opt = opt;
    // Optimal edges join consecutive levels.
    std::vector<std::vector<int>> level(std::size_t(opt) + 2);
    level[0].push_back(0);
    for (int k = 1; k <= m; ++k)
        if (pf.on_opt(k)) level[std::size_t(pf.F[k])].push_back(k);
    level[std::size_t(opt) + 1].push_back(n - 1);
    for (int l = 0; l <= opt; ++l)
        for (int u : level[l])
            for (int v : level[l + 1])
                if (v == n - 1 || causal_leq(pf.pos[u], pf.pos[v])) pf.opt_succ[u].push_back(v);
    for (auto& s : pf.opt_succ)
        std::sort(s.begin(), s.end(), [&](int a, int b) {
            return pf.pos[a].x < pf.pos[b].x || (pf.pos[a].x == pf.pos[b].x && pf.pos[a].t < pf.pos[b].t);
        });
    return pf;
}

inline PassageField passage_field(const Model& m, const OrderedQuad& q) {
    return std::visit([&](const auto& v) { return passage_field(v, q); }, m);
}

// Greedy walk over optimal edges preferring the smallest (left) or largest
// (right) spatial coordinate; this yields the pointwise extremal geodesic.
inline std::vector<int> extremal_path(const PassageField& pf, Side side) {
    std::vector<int> path{pf.source};
    int cur = pf.source;
    while (cur != pf.sink) {
        const auto& s = pf.opt_succ[cur];
        if (s.empty()) throw domain_error("optimal structure is broken");
        int best = s[0];
        for (int v : s) {
            const bool better = side == Side::left ? pf.pos[v].x < pf.pos[best].x
                                                   : pf.pos[v].x > pf.pos[best].x;
            if (better) best = v;
        }
        cur = best;
        path.push_back(cur);
    }
    return path;
}

inline Chain chain_from_path(const PassageField& pf, const std::vector<int>& path) {
    Chain c;
    c.quad = pf.quad;
    c.anchored = pf.anchored;
    for (int k : path) {
        if (pf.id[k] < 0) continue;
        c.nodes.push_back(pf.pos[k]);
        c.ids.push_back(pf.id[k]);
        c.value += pf.w[k];
    }
    return c;
}

inline Chain geodesic(const Model& m, const OrderedQuad& q, Side side) {
    const auto pf = passage_field(m, q);
    return chain_from_path(pf, extremal_path(pf, side));
}

inline bool on_optimal(const Model& m, const OrderedQuad& q, const SpaceTimePoint& p) {
    if (!causal_leq(q.start, p) || !causal_leq(p, q.end)) return false;
    if (p == q.start || p == q.end) return true;
    const auto pf = passage_field(m, q);
    for (int k = 0; k < pf.size(); ++k)
        if (pf.pos[k] == p) return pf.on_opt(k);
    return false;
}

// ---------------------------------------------------------------- networks

struct NetworkEdge {
    int from = 0, to = 0;
    std::vector<int> path;  // network node indices, both ends included
};

struct GeodesicNetwork {
    OrderedQuad quad;
    bool anchored = false;
    Value value = 0;
    std::vector<SpaceTimePoint> nodes;  // every node on some geodesic
    std::vector<std::int64_t> ids;
    std::vector<std::vector<int>> succ, pred;
    int source = 0, sink = 0;
    std::vector<int> vertices;
    std::vector<NetworkEdge> edges;
    std::vector<int> left_path, right_path;
    Chain leftmost, rightmost;
};

inline GeodesicNetwork network(const PassageField& pf) {
    GeodesicNetwork net;
    net.quad = pf.quad;
    net.anchored = pf.anchored;
    net.value = pf.opt;
    // Nodes reachable from the source through optimal edges, in index order.
    std::vector<char> seen(pf.size(), 0);
    seen[pf.source] = 1;
    for (int k = 0; k < pf.size(); ++k)
        if (seen[k])
            for (int v : pf.opt_succ[k]) seen[v] = 1;
    std::vector<int> local(pf.size(), -1);
    for (int k = 0; k < pf.size(); ++k)
        if (seen[k]) {
            local[k] = int(net.nodes.size());
            net.nodes.push_back(pf.pos[k]);
            net.ids.push_back(pf.id[k]);
        }
    const int n = int(net.nodes.size());
    net.succ.assign(n, {});
    net.pred.assign(n, {});
    for (int k = 0; k < pf.size(); ++k)
        if (seen[k])
            for (int v : pf.opt_succ[k]) {
                net.succ[local[k]].push_back(local[v]);
                net.pred[local[v]].push_back(local[k]);
            }
    net.source = local[pf.source];
    net.sink = local[pf.sink];
    std::vector<char> is_vertex(n, 0);
    for (int k = 0; k < n; ++k)
        if (k == net.source || k == net.sink || net.succ[k].size() >= 2 || net.pred[k].size() >= 2) {
            is_vertex[k] = 1;
            net.vertices.push_back(k);
        }
    for (int v : net.vertices)
        for (int s : net.succ[v]) {
            NetworkEdge e;
            e.from = v;
            e.path = {v, s};
            int cur = s;
            while (!is_vertex[cur]) {
                cur = net.succ[cur][0];
                e.path.push_back(cur);
            }
            e.to = cur;
            net.edges.push_back(std::move(e));
        }
    for (int k : extremal_path(pf, Side::left)) net.left_path.push_back(local[k]);
    for (int k : extremal_path(pf, Side::right)) net.right_path.push_back(local[k]);
    net.leftmost = chain_from_path(pf, extremal_path(pf, Side::left));
    net.rightmost = chain_from_path(pf, extremal_path(pf, Side::right));
    return net;
}

inline GeodesicNetwork network(const Model& m, const OrderedQuad& q) {
    return network(passage_field(m, q));
}

// ---------------------------------------------------------------- overlap

struct Interval {
    double lo = 0.0, hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Closure of the set of interior common times at which the two graphs coincide.
inline std::vector<Interval> overlap_polylines(const std::vector<SpaceTimePoint>& pa,
                                               const std::vector<SpaceTimePoint>& pb) {
    const double lo = std::max(pa.front().t, pb.front().t);
    const double hi = std::min(pa.back().t, pb.back().t);
    if (lo > hi) return {};
    std::vector<double> ts{lo, hi};
    for (const auto& p : pa)
        if (p.t >= lo && p.t <= hi) ts.push_back(p.t);
    for (const auto& p : pb)
        if (p.t >= lo && p.t <= hi) ts.push_back(p.t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> d(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) d[k] = polyline_x(pa, ts[k]) - polyline_x(pb, ts[k]);
    std::vector<Interval> raw;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (d[k] == 0.0) raw.push_back({ts[k], ts[k]});
        if (k + 1 < ts.size()) {
            if (d[k] == 0.0 && d[k + 1] == 0.0) raw.push_back({ts[k], ts[k + 1]});
            else if ((d[k] < 0.0 && d[k + 1] > 0.0) || (d[k] > 0.0 && d[k + 1] < 0.0)) {
                const double s = ts[k] + d[k] / (d[k] - d[k + 1]) * (ts[k + 1] - ts[k]);
                raw.push_back({s, s});
            }
        }
    }
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> merged;
    for (const auto& iv : raw) {
        if (!merged.empty() && iv.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, iv.hi);
        else merged.push_back(iv);
    }
    std::vector<Interval> out;
    for (const auto& iv : merged) {
        const bool degenerate = iv.lo == iv.hi;
        if (degenerate && (iv.lo == lo || iv.lo == hi)) continue;
        out.push_back(iv);
    }
    return out;
}

inline std::vector<Interval> overlap(const Chain& a, const Chain& b) {
    const auto pa = chain_polyline(a), pb = chain_polyline(b);
    if (pa.empty() || pb.empty()) return {};
    return overlap_polylines(pa, pb);
}

// Earliest time after which two chains with a common terminal point agree.
inline double coalescence_time(const Chain& a, const Chain& b) {
    const auto pa = chain_polyline(a), pb = chain_polyline(b);
    if (pa.empty() || pb.empty() || !(pa.back() == pb.back()))
        throw domain_error("chains do not share a terminal point");
    const double end = pa.back().t;
    const auto ov = overlap_polylines(pa, pb);
    if (!ov.empty() && ov.back().hi == end && ov.back().lo < end) return ov.back().lo;
    return end;
}

}  // namespace lppgap
