#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "lppgap/passage.hpp"

namespace lppgap {

// Lexicographic cost: primary is the negated path weight, secondary the signed
// area under the graphs (selects the leftmost or rightmost optimum).
struct LexCost {
    double p = 0.0;
    double s = 0.0;
};

inline LexCost operator+(LexCost a, LexCost b) { return {a.p + b.p, a.s + b.s}; }
inline LexCost operator-(LexCost a) { return {-a.p, -a.s}; }

inline bool lex_less(const LexCost& a, const LexCost& b) {
    const double ep = 1e-9 * (1.0 + std::fabs(a.p) + std::fabs(b.p));
    if (a.p < b.p - ep) return true;
    if (a.p > b.p + ep) return false;
    const double es = 1e-9 * (1.0 + std::fabs(a.s) + std::fabs(b.s));
    return a.s < b.s - es;
}

class MinCostFlow {
public:
    struct Arc {
        int to, rev, cap;
        LexCost cost;
        int orig = 0;  // capacity as added; zero on reverse arcs
    };

    explicit MinCostFlow(int n) : g_(std::size_t(n)) {}

    void add_arc(int u, int v, int cap, LexCost cost) {
        g_[u].push_back({v, int(g_[v].size()), cap, cost, cap});
        g_[v].push_back({u, int(g_[u].size()) - 1, 0, -cost, 0});
    }

    // Pushes up to `units` along successive shortest paths (label-correcting,
    // so negative arc costs are fine).  Returns the flow actually sent.
    int run(int s, int t, int units) {
        int sent = 0;
        const int n = int(g_.size());
        while (sent < units) {
            std::vector<LexCost> dist(n);
            std::vector<char> reached(n, 0), queued(n, 0);
            std::vector<std::pair<int, int>> parent(n, {-1, -1});
            std::deque<int> q{s};
            reached[s] = 1;
            queued[s] = 1;
            while (!q.empty()) {
                const int u = q.front();
                q.pop_front();
                queued[u] = 0;
                for (int k = 0; k < int(g_[u].size()); ++k) {
                    const Arc& a = g_[u][k];
                    if (a.cap <= 0) continue;
                    const LexCost nd = dist[u] + a.cost;
                    if (!reached[a.to] || lex_less(nd, dist[a.to])) {
                        reached[a.to] = 1;
                        dist[a.to] = nd;
                        parent[a.to] = {u, k};
                        if (!queued[a.to]) {
                            queued[a.to] = 1;
                            q.push_back(a.to);
                        }
                    }
                }
            }
            if (!reached[t]) break;
            int push = units - sent;
            for (int v = t; v != s; v = parent[v].first)
                push = std::min(push, g_[parent[v].first][parent[v].second].cap);
            for (int v = t; v != s; v = parent[v].first) {
                Arc& a = g_[parent[v].first][parent[v].second];
                a.cap -= push;
                g_[v][a.rev].cap += push;
            }
            sent += push;
        }
        return sent;
    }

    const std::vector<std::vector<Arc>>& arcs() const { return g_; }

private:
    std::vector<std::vector<Arc>> g_;
};

// The causal DAG of a two-path problem.
struct PairDag {
    bool anchored = false;
    std::vector<SpaceTimePoint> pos;
    std::vector<Value> w;
    std::vector<std::int64_t> id;
    std::vector<int> cap;
    std::vector<std::vector<int>> succ;
    std::vector<int> starts, ends;   // node indices, left first
    std::vector<int> supply, demand;
    bool infeasible = false;  // some endpoint cannot be reached at all
};

struct EndpointPair {
    SpaceTimePoint first, second;  // first weakly left of second
    bool doubled() const { return first == second; }
};

inline EndpointPair doubled(const SpaceTimePoint& p) { return {p, p}; }

inline PairDag pair_dag(const LatticeField& f, const EndpointPair& a, const EndpointPair& b) {
    const Cell a1 = f.require_cell(a.first), a2 = f.require_cell(a.second);
    const Cell b1 = f.require_cell(b.first), b2 = f.require_cell(b.second);
    const int i0 = std::min(a1.i, a2.i), j0 = std::min(a1.j, a2.j);
    const int i1 = std::max(b1.i, b2.i), j1 = std::max(b1.j, b2.j);
    if (i1 < i0 || j1 < j0) throw domain_error("endpoints are not causally ordered");
    const int H = i1 - i0 + 1, W = j1 - j0 + 1;
    PairDag d;
    for (const Cell& c : {b1, b2})
        if (c.i < i0 || c.j < j0) d.infeasible = true;
    for (const Cell& c : {a1, a2})
        if (c.i > i1 || c.j > j1) d.infeasible = true;
    if (d.infeasible) return d;
    const int n = H * W;
    d.pos.resize(n);
    d.w.resize(n);
    d.id.resize(n);
    d.cap.assign(n, 1);
    d.succ.assign(n, {});
    for (int di = 0; di < H; ++di)
        for (int dj = 0; dj < W; ++dj) {
            const int k = di * W + dj;
            d.pos[k] = cell_point(i0 + di, j0 + dj);
            d.w[k] = f.at(i0 + di, j0 + dj);
            d.id[k] = std::int64_t(i0 + di) * f.cols + (j0 + dj);
            if (di + 1 < H) d.succ[k].push_back(k + W);
            if (dj + 1 < W) d.succ[k].push_back(k + 1);
        }
    auto local = [&](Cell c) { return (c.i - i0) * W + (c.j - j0); };
    if (a.doubled()) {
        d.starts = {local(a1)};
        d.supply = {2};
        d.cap[local(a1)] = 2;
    } else {
        d.starts = {local(a1), local(a2)};
        d.supply = {1, 1};
    }
    if (b.doubled()) {
        d.ends = {local(b1)};
        d.demand = {2};
        d.cap[local(b1)] = 2;
    } else {
        d.ends = {local(b1), local(b2)};
        d.demand = {1, 1};
    }
    return d;
}

inline PairDag pair_dag(const PoissonCloud& c, const EndpointPair& a, const EndpointPair& b) {
    PairDag d;
    d.anchored = true;
    auto add = [&](SpaceTimePoint p, Value w, std::int64_t id, int cap) {
        d.pos.push_back(p);
        d.w.push_back(w);
        d.id.push_back(id);
        d.cap.push_back(cap);
        return int(d.pos.size()) - 1;
    };
    if (a.doubled()) {
        d.starts = {add(a.first, 0, -1, 2)};
        d.supply = {2};
    } else {
        d.starts = {add(a.first, 0, -1, 1), add(a.second, 0, -1, 1)};
        d.supply = {1, 1};
    }
    for (int k = 0; k < int(c.points.size()); ++k) {
        const auto& p = c.points[k];
        const bool from = causal_leq(a.first, p) || causal_leq(a.second, p);
        const bool to = causal_leq(p, b.first) || causal_leq(p, b.second);
        if (from && to) add(p, 1, k, 1);
    }
    if (b.doubled()) {
        d.ends = {add(b.first, 0, -2, 2)};
        d.demand = {2};
    } else {
        d.ends = {add(b.first, 0, -2, 1), add(b.second, 0, -2, 1)};
        d.demand = {1, 1};
    }
    const int n = int(d.pos.size());
    d.succ.assign(n, {});
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            const bool u_end = d.id[u] == -2, v_start = d.id[v] == -1;
            if (u_end || v_start) continue;
            if (causal_leq(d.pos[u], d.pos[v]) && !(d.pos[u] == d.pos[v])) d.succ[u].push_back(v);
        }
    return d;
}

struct DisjointPair {
    Chain left, right;
    Value value = 0;
};

struct PairPaths {
    Value value = 0;
    std::vector<int> a, b;  // node index sequences
};

// Two node-disjoint (except doubled anchors) paths of maximum total weight;
// ties broken toward the smallest (left) or largest (right) summed area.
inline std::optional<PairPaths> best_pair(const PairDag& d, Side side) {
    if (d.infeasible) return std::nullopt;
    const int n = int(d.pos.size());
    const int S = 2 * n, T = 2 * n + 1;
    MinCostFlow mcf(2 * n + 2);
    const double sgn = side == Side::left ? 1.0 : -1.0;
    for (int k = 0; k < n; ++k) mcf.add_arc(2 * k, 2 * k + 1, d.cap[k], {-d.w[k], 0.0});
    for (int u = 0; u < n; ++u)
        for (int v : d.succ[u]) {
            const double area = (d.pos[v].t - d.pos[u].t) * (d.pos[u].x + d.pos[v].x) / 2.0;
            mcf.add_arc(2 * u + 1, 2 * v, 2, {0.0, sgn * area});
        }
    for (std::size_t k = 0; k < d.starts.size(); ++k) mcf.add_arc(S, 2 * d.starts[k], d.supply[k], {});
    for (std::size_t k = 0; k < d.ends.size(); ++k) mcf.add_arc(2 * d.ends[k] + 1, T, d.demand[k], {});
    if (mcf.run(S, T, 2) < 2) return std::nullopt;
    const auto& g = mcf.arcs();
    // Peel the two unit paths off the flow.
    std::vector<std::vector<int>> used(g.size());
    for (std::size_t u = 0; u < g.size(); ++u) used[u].assign(g[u].size(), 0);
    PairPaths out;
    for (int unit = 0; unit < 2; ++unit) {
        std::vector<int> path;
        int u = S;
        while (u != T) {
            int next = -1;
            for (int k = 0; k < int(g[u].size()); ++k) {
                const auto& a = g[u][k];
                if (a.orig > 0 && a.orig - a.cap - used[u][k] > 0) {
                    ++used[u][k];
                    next = a.to;
                    break;
                }
            }
            if (next < 0) return std::nullopt;
            u = next;
            if (u < 2 * n && u % 2 == 0) path.push_back(u / 2);
        }
        for (int k : path) out.value += d.w[k];
        (unit == 0 ? out.a : out.b) = std::move(path);
    }
    return out;
}

inline Chain chain_of(const PairDag& d, const std::vector<int>& path, const OrderedQuad& q) {
    Chain c;
    c.quad = q;
    c.anchored = d.anchored;
    for (int k : path) {
        if (d.id[k] < 0) continue;
        c.nodes.push_back(d.pos[k]);
        c.ids.push_back(d.id[k]);
        c.value += d.w[k];
    }
    return c;
}

inline std::optional<Value> disjoint2_value(const Model& m, const EndpointPair& a, const EndpointPair& b) {
    if (!(a.first.t == a.second.t && b.first.t == b.second.t && a.first.x <= a.second.x &&
          b.first.x <= b.second.x && a.first.t < b.first.t))
        throw parameter_error("endpoint pairs must be weakly ordered at common times");
    const PairDag d = std::visit([&](const auto& v) { return pair_dag(v, a, b); }, m);
    const auto r = best_pair(d, Side::left);
    if (!r) return std::nullopt;
    return r->value;
}

inline std::optional<Value> disjoint2_value(const Model& m, const OrderedQuad& q) {
    return disjoint2_value(m, doubled(q.start), doubled(q.end));
}

// Extremal 2-optimizer between (possibly doubled) endpoint pairs.
inline std::optional<DisjointPair> optimizer2(const Model& m, const EndpointPair& a,
                                             const EndpointPair& b, Side side) {
    const PairDag d = std::visit([&](const auto& v) { return pair_dag(v, a, b); }, m);
    const auto r = best_pair(d, side);
    if (!r) return std::nullopt;
    // Polylines of both members, anchors included.
    auto poly = [&](const std::vector<int>& path) {
        std::vector<SpaceTimePoint> p;
        for (int k : path) p.push_back(d.pos[k]);
        return p;
    };
    const auto pa = poly(r->a), pb = poly(r->b);
    std::vector<int> lpath, rpath;
    if (!d.anchored) {
        // Lattice paths cannot cross; order them by their first distinct position.
        bool a_left = true;
        const std::size_t len = std::min(pa.size(), pb.size());
        for (std::size_t k = 0; k < len; ++k)
            if (pa[k].x != pb[k].x) {
                a_left = pa[k].x < pb[k].x;
                break;
            }
        lpath = a_left ? r->a : r->b;
        rpath = a_left ? r->b : r->a;
    } else {
        // Point-disjoint chains may cross; split the points into the lower and
        // upper envelopes.
        std::vector<std::pair<double, int>> lower, upper;
        for (int k : r->a) {
            if (d.id[k] < 0) continue;
            const double other = polyline_x(pb, d.pos[k].t);
            (d.pos[k].x <= other ? lower : upper).push_back({d.pos[k].t, k});
        }
        for (int k : r->b) {
            if (d.id[k] < 0) continue;
            const double other = polyline_x(pa, d.pos[k].t);
            (d.pos[k].x < other ? lower : upper).push_back({d.pos[k].t, k});
        }
        std::sort(lower.begin(), lower.end());
        std::sort(upper.begin(), upper.end());
        for (auto& e : lower) lpath.push_back(e.second);
        for (auto& e : upper) rpath.push_back(e.second);
    }
    DisjointPair out;
    out.left = chain_of(d, lpath, {a.first, b.first});
    out.right = chain_of(d, rpath, {a.second, b.second});
    out.value = out.left.value + out.right.value;
    return out;
}

inline std::optional<DisjointPair> optimizer2(const Model& m, const OrderedQuad& q, Side side) {
    return optimizer2(m, doubled(q.start), doubled(q.end), side);
}

// 2L - L2 for doubled endpoints; nullopt when no disjoint pair exists.
inline std::optional<Value> gap_value(const Model& m, const OrderedQuad& q) {
    const auto l2 = disjoint2_value(m, q);
    if (!l2) return std::nullopt;
    return 2.0 * passage_value(m, q) - *l2;
}

// ---------------------------------------------------------------- Greene / RSK

// Shape of the RSK insertion tableau of a word (rows weakly increasing).
inline std::vector<int> rsk_shape(const std::vector<double>& word) {
    std::vector<std::vector<double>> rows;
    for (double x : word) {
        for (std::size_t r = 0;; ++r) {
            if (r == rows.size()) {
                rows.push_back({x});
                break;
            }
            auto it = std::upper_bound(rows[r].begin(), rows[r].end(), x);
            if (it == rows[r].end()) {
                rows[r].push_back(x);
                break;
            }
            std::swap(x, *it);
        }
    }
    std::vector<int> shape;
    for (const auto& r : rows) shape.push_back(int(r.size()));
    return shape;
}

inline std::vector<Value> greene_partial_sums(const std::vector<int>& shape, int k) {
    if (k < 1) throw parameter_error("k must be >= 1");
    std::vector<Value> out;
    Value acc = 0;
    for (int j = 0; j < k; ++j) {
        if (j < int(shape.size())) acc += shape[j];
        out.push_back(acc);
    }
    return out;
}

inline std::vector<Value> greene_values(const std::vector<double>& word, int k) {
    return greene_partial_sums(rsk_shape(word), k);
}

inline std::vector<Value> greene_values(const PoissonCloud& c, const OrderedQuad& q, int k) {
    const auto idx = diamond_points(c, q.start, q.end);
    std::vector<GridPoint> g;
    for (int i : idx) g.push_back(rotate45(c.points[i]));
    std::sort(g.begin(), g.end(), [](const GridPoint& a, const GridPoint& b) {
        return a.u < b.u || (a.u == b.u && a.v < b.v);
    });
    std::vector<double> word;
    for (const auto& p : g) word.push_back(p.v);
    return greene_values(word, k);
}

inline std::vector<Value> greene_values(const Model& m, const OrderedQuad& q, int k) {
    if (!std::holds_alternative<PoissonCloud>(m))
        throw domain_error("Greene values need a point-cloud model");
    return greene_values(std::get<PoissonCloud>(m), q, k);
}

}  // namespace lppgap
