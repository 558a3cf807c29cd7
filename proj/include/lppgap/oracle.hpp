#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lppgap/disjoint.hpp"
#include "lppgap/parallel.hpp"
#include "lppgap/rng.hpp"

// Exhaustive enumeration on tiny instances, used as ground truth for the engines.
namespace lppgap::oracle {

inline constexpr int max_lattice_side = 5;
inline constexpr int max_cloud_points = 12;

struct EnumeratedPath {
    std::vector<SpaceTimePoint> nodes;  // weighted nodes only (anchors omitted)
    std::vector<std::int64_t> ids;
    Value value = 0;
};

struct EnumeratedPair {
    int left = 0, right = 0;  // indices into the first and second path lists
    Value value = 0;
};

struct EnumerationResult {
    std::vector<EnumeratedPath> paths;
    Value optimum = 0;
    std::vector<int> optimal;  // indices of optimal paths
    // Pair part: paths from the second start to the second end (equal to
    // `paths` for doubled endpoints), all interior-disjoint pairs, the optimum
    // and its argmax set.
    std::vector<EnumeratedPath> paths2;
    std::vector<EnumeratedPair> pairs;
    std::optional<Value> pair_optimum;
    std::vector<int> pair_argmax;  // indices into `pairs`
};

// ---------------------------------------------------------------- path lists

inline void check_size(const LatticeField& f, Cell a, Cell b) {
    const int h = b.i - a.i + 1, w = b.j - a.j + 1;
    if (h > max_lattice_side || w > max_lattice_side)
        throw parameter_error("instance too large for enumeration: lattice rectangle " + std::to_string(h) + "x" +
                              std::to_string(w) + " exceeds " + std::to_string(max_lattice_side) + "x" +
                              std::to_string(max_lattice_side));
    (void)f;
}

inline std::vector<EnumeratedPath> lattice_paths(const LatticeField& f, const SpaceTimePoint& s,
                                                 const SpaceTimePoint& e) {
    const Cell a = f.require_cell(s), b = f.require_cell(e);
    std::vector<EnumeratedPath> out;
    if (b.i < a.i || b.j < a.j) return out;
    check_size(f, a, b);
    EnumeratedPath cur;
    std::function<void(Cell)> walk = [&](Cell c) {
        cur.nodes.push_back(cell_point(c));
        cur.ids.push_back(std::int64_t(c.i) * f.cols + c.j);
        cur.value += f.at(c.i, c.j);
        if (c.i == b.i && c.j == b.j) out.push_back(cur);
        if (c.i < b.i) walk({c.i + 1, c.j});
        if (c.j < b.j) walk({c.i, c.j + 1});
        cur.value -= f.at(c.i, c.j);
        cur.nodes.pop_back();
        cur.ids.pop_back();
    };
    walk(a);
    return out;
}

// Every causal chain of cloud points inside the diamond between two anchors,
// the empty chain included.
inline std::vector<EnumeratedPath> cloud_chains(const PoissonCloud& c, const SpaceTimePoint& s,
                                                const SpaceTimePoint& e) {
    std::vector<EnumeratedPath> out;
    if (!causal_leq(s, e)) return out;
    const auto idx = diamond_points(c, s, e);
    if (int(idx.size()) > max_cloud_points)
        throw parameter_error("instance too large for enumeration: " + std::to_string(idx.size()) +
                              " cloud points exceed " + std::to_string(max_cloud_points));
    EnumeratedPath cur;
    std::function<void(std::size_t)> grow = [&](std::size_t from) {
        out.push_back(cur);
        for (std::size_t k = from; k < idx.size(); ++k) {
            const auto& p = c.points[idx[k]];
            if (!cur.nodes.empty() && !(causal_leq(cur.nodes.back(), p) && !(cur.nodes.back() == p))) continue;
            cur.nodes.push_back(p);
            cur.ids.push_back(idx[k]);
            cur.value += 1;
            grow(k + 1);
            cur.value -= 1;
            cur.nodes.pop_back();
            cur.ids.pop_back();
        }
    };
    grow(0);
    return out;
}

inline std::vector<EnumeratedPath> path_list(const Model& m, const SpaceTimePoint& s, const SpaceTimePoint& e) {
    if (const auto* f = std::get_if<LatticeField>(&m)) return lattice_paths(*f, s, e);
    return cloud_chains(std::get<PoissonCloud>(m), s, e);
}

inline EnumerationResult enumerate_paths(const Model& m, const OrderedQuad& q) {
    EnumerationResult r;
    r.paths = path_list(m, q.start, q.end);
    if (r.paths.empty()) throw domain_error("endpoints are not causally ordered");
    r.optimum = r.paths[0].value;
    for (const auto& p : r.paths) r.optimum = std::max(r.optimum, p.value);
    for (int k = 0; k < int(r.paths.size()); ++k)
        if (value_eq(r.paths[k].value, r.optimum)) r.optimal.push_back(k);
    return r;
}

// ---------------------------------------------------------------- pairs

inline std::vector<SpaceTimePoint> polyline(const EnumeratedPath& p, const SpaceTimePoint& s, const SpaceTimePoint& e,
                                            bool anchored) {
    std::vector<SpaceTimePoint> poly;
    if (anchored) poly.push_back(s);
    for (const auto& n : p.nodes)
        if (poly.empty() || !(poly.back() == n)) poly.push_back(n);
    if (anchored && !(poly.back() == e)) poly.push_back(e);
    return poly;
}

// Whether polyline a stays weakly left of polyline b on their common times.
inline bool weakly_left(const std::vector<SpaceTimePoint>& a, const std::vector<SpaceTimePoint>& b) {
    std::vector<double> ts;
    for (const auto& p : a) ts.push_back(p.t);
    for (const auto& p : b) ts.push_back(p.t);
    const double lo = std::max(a.front().t, b.front().t), hi = std::min(a.back().t, b.back().t);
    for (double t : ts)
        if (t >= lo && t <= hi && polyline_x(a, t) > polyline_x(b, t) + 1e-12) return false;
    return true;
}

// Nodes two paths may share: doubled lattice endpoints.
inline std::set<std::int64_t> shareable(const Model& m, const EndpointPair& a, const EndpointPair& b) {
    std::set<std::int64_t> s;
    if (const auto* f = std::get_if<LatticeField>(&m)) {
        auto id = [&](const SpaceTimePoint& p) {
            const Cell c = f->require_cell(p);
            return std::int64_t(c.i) * f->cols + c.j;
        };
        if (a.doubled()) s.insert(id(a.first));
        if (b.doubled()) s.insert(id(b.first));
    }
    return s;
}

// All pairs of node-disjoint paths (doubled endpoints excepted) from the
// start pair to the end pair.  For doubled starts and ends each unordered
// pair is listed once, left member first.
inline EnumerationResult enumerate_disjoint_pairs(const Model& m, const EndpointPair& a, const EndpointPair& b) {
    if (!(a.first.t == a.second.t && b.first.t == b.second.t && a.first.x <= a.second.x && b.first.x <= b.second.x))
        throw parameter_error("endpoint pairs must be weakly ordered at common times");
    EnumerationResult r;
    r.paths = path_list(m, a.first, b.first);
    r.paths2 = path_list(m, a.second, b.second);
    const bool anchored = std::holds_alternative<PoissonCloud>(m);
    const bool symmetric = a.doubled() && b.doubled();
    const auto share = shareable(m, a, b);
    std::vector<std::vector<SpaceTimePoint>> poly1, poly2;
    for (const auto& p : r.paths) poly1.push_back(polyline(p, a.first, b.first, anchored));
    for (const auto& p : r.paths2) poly2.push_back(polyline(p, a.second, b.second, anchored));
    for (int i = 0; i < int(r.paths.size()); ++i)
        for (int j = symmetric ? i : 0; j < int(r.paths2.size()); ++j) {
            const auto& p = r.paths[i];
            const auto& q = r.paths2[j];
            bool disjoint = true;
            for (auto id : p.ids)
                if (!share.count(id) && std::find(q.ids.begin(), q.ids.end(), id) != q.ids.end()) {
                    disjoint = false;
                    break;
                }
            if (!disjoint) continue;
            if (symmetric && !anchored && !weakly_left(poly1[i], poly2[j])) continue;
            r.pairs.push_back({i, j, p.value + q.value});
        }
    for (const auto& pr : r.pairs)
        if (!r.pair_optimum || pr.value > *r.pair_optimum) r.pair_optimum = pr.value;
    for (int k = 0; k < int(r.pairs.size()); ++k)
        if (value_eq(r.pairs[k].value, *r.pair_optimum)) r.pair_argmax.push_back(k);
    return r;
}

inline EnumerationResult enumerate_disjoint_pairs(const Model& m, const OrderedQuad& q) {
    return enumerate_disjoint_pairs(m, doubled(q.start), doubled(q.end));
}

// Best pair gamma1 <= gamma2 (weakly ordered, sharing allowed) between doubled
// endpoints, with shared nodes counted once; doubled lattice endpoints still
// count twice, as in the disjoint problem.
inline Value weak_pair_value(const Model& m, const OrderedQuad& q) {
    const auto paths = path_list(m, q.start, q.end);
    if (paths.empty()) throw domain_error("endpoints are not causally ordered");
    const bool anchored = std::holds_alternative<PoissonCloud>(m);
    const auto share = shareable(m, doubled(q.start), doubled(q.end));
    std::vector<std::vector<SpaceTimePoint>> poly;
    for (const auto& p : paths) poly.push_back(polyline(p, q.start, q.end, anchored));
    auto weight_of = [&](std::int64_t id, const SpaceTimePoint& pos) -> Value {
        if (const auto* f = std::get_if<LatticeField>(&m)) {
            const Cell c = f->require_cell(pos);
            return f->at(c.i, c.j);
        }
        (void)id;
        return 1.0;
    };
    Value best = -1;
    for (std::size_t i = 0; i < paths.size(); ++i)
        for (std::size_t j = 0; j < paths.size(); ++j) {
            if (!weakly_left(poly[i], poly[j])) continue;
            Value v = paths[i].value + paths[j].value;
            for (std::size_t k = 0; k < paths[i].ids.size(); ++k) {
                const auto id = paths[i].ids[k];
                if (share.count(id)) continue;
                if (std::find(paths[j].ids.begin(), paths[j].ids.end(), id) != paths[j].ids.end())
                    v -= weight_of(id, paths[i].nodes[k]);
            }
            best = std::max(best, v);
        }
    return best;
}

// Union of nodes on optimal paths (anchors included for clouds) and the
// branching vertices of the optimal-path graph.
struct NetworkSets {
    std::set<std::pair<double, double>> nodes, vertices;  // (t, x)
};

inline NetworkSets network_sets(const Model& m, const OrderedQuad& q, const EnumerationResult& r) {
    const bool anchored = std::holds_alternative<PoissonCloud>(m);
    NetworkSets s;
    std::map<std::pair<double, double>, std::set<std::pair<double, double>>> succ, pred;
    for (int k : r.optimal) {
        const auto poly = anchored ? polyline(r.paths[k], q.start, q.end, true) : r.paths[k].nodes;
        // Keep consecutive duplicates out (an empty chain between equal anchors).
        for (std::size_t i = 0; i < poly.size(); ++i) {
            s.nodes.insert({poly[i].t, poly[i].x});
            if (i + 1 < poly.size()) {
                succ[{poly[i].t, poly[i].x}].insert({poly[i + 1].t, poly[i + 1].x});
                pred[{poly[i + 1].t, poly[i + 1].x}].insert({poly[i].t, poly[i].x});
            }
        }
    }
    for (const auto& n : s.nodes) {
        const bool ends = n == std::pair{q.start.t, q.start.x} || n == std::pair{q.end.t, q.end.x};
        if (ends || succ[n].size() >= 2 || pred[n].size() >= 2) s.vertices.insert(n);
    }
    return s;
}

// Pointwise extremal optimal path, if one optimal path lies weakly on that
// side of every other.
inline std::optional<int> extremal_optimal(const Model& m, const OrderedQuad& q, const EnumerationResult& r,
                                           Side side) {
    const bool anchored = std::holds_alternative<PoissonCloud>(m);
    std::vector<std::vector<SpaceTimePoint>> poly;
    for (int k : r.optimal) poly.push_back(polyline(r.paths[k], q.start, q.end, anchored));
    for (std::size_t a = 0; a < poly.size(); ++a) {
        bool ok = true;
        for (std::size_t b = 0; b < poly.size() && ok; ++b)
            ok = side == Side::left ? weakly_left(poly[a], poly[b]) : weakly_left(poly[b], poly[a]);
        if (ok) return r.optimal[a];
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- verify_engine

struct EngineHooks {
    // Applied to every engine passage value before comparison (fault injection).
    std::function<Value(const Model&, const OrderedQuad&, Value)> passage;
};

struct BatchSpec {
    int lattice = 200, cloud = 200;
    int max_side = 4;     // lattice rectangles up to max_side x max_side
    int max_points = 10;  // cloud points in the diamond
    std::uint64_t seed = 1;
    int threads = 1;
    EngineHooks hooks;
};

struct VerifyReport {
    bool pass = true;
    std::size_t instances = 0, checks = 0;
    std::size_t failures = 0;
    std::string warning;
    nlohmann::json counterexample;  // first failure, replayable
    // Probe tallies: weak-pair value equal to / above the disjoint value.
    std::size_t weak_equal = 0, weak_above = 0;
};

struct Instance {
    Model model;
    OrderedQuad quad;
};

inline constexpr std::uint32_t stream_oracle = 0x0ac1e;

inline Instance lattice_instance(std::uint64_t seed, int k, int max_side) {
    auto u = [&](int lane) { return rng::uniform(seed, stream_oracle, std::uint64_t(k), lane); };
    int rows = 1 + int(u(0) * max_side), cols = 1 + int(u(1) * max_side);
    if (rows + cols < 3) cols = 2;
    rows = std::min(rows, max_side);
    cols = std::min(cols, max_side);
    // Small integer weights make ties (and hence non-trivial networks) common.
    auto w = std::vector<std::vector<double>>(std::size_t(rows), std::vector<double>(std::size_t(cols), 0.0));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const double v = rng::uniform(seed, stream_oracle + 1, std::uint64_t(k) * 64 + std::uint64_t(i * cols + j));
            w[i][j] = double(rng::geometric_from_uniform(v, 0.5));
        }
    Instance in{make_explicit_field(w), {}};
    in.quad = {cell_point(0, 0), cell_point(rows - 1, cols - 1)};
    return in;
}

inline Instance cloud_instance(std::uint64_t seed, int k, int max_points) {
    const int n = int(rng::uniform(seed, stream_oracle + 2, std::uint64_t(k)) * (max_points + 1));
    std::vector<SpaceTimePoint> pts;
    for (int p = 0; p < std::min(n, max_points); ++p) {
        const auto b = rng::block64(seed, stream_oracle + 3, std::uint64_t(k) * 64 + std::uint64_t(p));
        const double a = rng::to_open01(b[0]), c = rng::to_open01(b[1]);
        pts.push_back(unrotate45({2 * a, 2 * c}));
    }
    return {make_explicit_cloud(pts), {{0, 0}, {0, 2}}};
}

inline nlohmann::json quad_json(const OrderedQuad& q) {
    return {{"start", {q.start.x, q.start.t}}, {"end", {q.end.x, q.end.t}}};
}

inline nlohmann::json counterexample_json(const std::string& check, const Instance& in, const nlohmann::json& engine,
                                          const nlohmann::json& oracle) {
    return {{"check", check}, {"model", descriptor(in.model)}, {"quad", quad_json(in.quad)},
            {"engine", engine}, {"oracle", oracle}};
}

inline nlohmann::json value_json(const std::optional<Value>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

// Runs every check on one instance; returns the first failure, if any.
inline std::optional<nlohmann::json> verify_instance(const Instance& in, const EngineHooks& hooks,
                                                     std::size_t& checks, int& weak_cmp) {
    const Model& m = in.model;
    const auto& q = in.quad;
    const bool cloud = std::holds_alternative<PoissonCloud>(m);
    const auto paths = enumerate_paths(m, q);
    const auto pairs = enumerate_disjoint_pairs(m, q);

    Value lv = passage_value(m, q);
    if (hooks.passage) lv = hooks.passage(m, q, lv);
    ++checks;
    if (!value_eq(lv, paths.optimum)) return counterexample_json("passage_value", in, lv, paths.optimum);

    const auto d2 = disjoint2_value(m, q);
    ++checks;
    if (d2.has_value() != pairs.pair_optimum.has_value() || (d2 && !value_eq(*d2, *pairs.pair_optimum)))
        return counterexample_json("disjoint2_value", in, value_json(d2), value_json(pairs.pair_optimum));

    const auto g = gap_value(m, q);
    const std::optional<Value> og =
        pairs.pair_optimum ? std::optional<Value>(2 * paths.optimum - *pairs.pair_optimum) : std::nullopt;
    ++checks;
    if (g.has_value() != og.has_value() || (g && !value_eq(*g, *og)))
        return counterexample_json("gap_value", in, value_json(g), value_json(og));

    if (cloud) {
        const auto gv = greene_values(m, q, 2);
        // The unanchored two-chain optimum equals the anchored one: anchors weigh nothing.
        ++checks;
        if (!value_eq(gv[0], paths.optimum) || !pairs.pair_optimum || !value_eq(gv[1], *pairs.pair_optimum))
            return counterexample_json("greene_values", in, gv, {paths.optimum, value_json(pairs.pair_optimum)});
    }

    for (Side side : {Side::left, Side::right}) {
        const auto o2 = optimizer2(m, q, side);
        ++checks;
        if (o2.has_value() != pairs.pair_optimum.has_value() || (o2 && !value_eq(o2->value, *pairs.pair_optimum)))
            return counterexample_json("optimizer2", in, o2 ? nlohmann::json(o2->value) : nlohmann::json(),
                                       value_json(pairs.pair_optimum));
        if (o2) {
            // The returned pair must be one of the enumerated optimal pairs.
            auto same = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) { return a == b; };
            bool found = false;
            for (int k : pairs.pair_argmax) {
                const auto& pr = pairs.pairs[k];
                const auto& a = pairs.paths[pr.left].ids;
                const auto& b = pairs.paths2[pr.right].ids;
                auto sorted_union = [](std::vector<std::int64_t> x, const std::vector<std::int64_t>& y) {
                    x.insert(x.end(), y.begin(), y.end());
                    std::sort(x.begin(), x.end());
                    return x;
                };
                if (cloud ? same(sorted_union(a, b), sorted_union(o2->left.ids, o2->right.ids))
                          : (same(a, o2->left.ids) && same(b, o2->right.ids))) {
                    found = true;
                    break;
                }
            }
            ++checks;
            if (!found) return counterexample_json("optimizer2_pair", in, o2->value, *pairs.pair_optimum);
        }
    }

    for (Side side : {Side::left, Side::right}) {
        const auto ex = extremal_optimal(m, q, paths, side);
        if (!ex) continue;
        const auto c = geodesic(m, q, side);
        ++checks;
        if (c.ids != paths.paths[*ex].ids)
            return counterexample_json(side == Side::left ? "geodesic_left" : "geodesic_right", in, c.ids,
                                       paths.paths[*ex].ids);
    }

    const auto net = network(m, q);
    const auto sets = network_sets(m, q, paths);
    std::set<std::pair<double, double>> nodes, verts;
    for (const auto& p : net.nodes) nodes.insert({p.t, p.x});
    for (int v : net.vertices) verts.insert({net.nodes[v].t, net.nodes[v].x});
    ++checks;
    if (nodes != sets.nodes || verts != sets.vertices)
        return counterexample_json("network_vertices", in, nlohmann::json(verts), nlohmann::json(sets.vertices));

    if (pairs.pair_optimum) {
        const Value wv = weak_pair_value(m, q);
        ++checks;
        if (wv + 1e-9 < *pairs.pair_optimum) return counterexample_json("weak_pair_value", in, wv, *pairs.pair_optimum);
        weak_cmp = value_eq(wv, *pairs.pair_optimum) ? 0 : 1;
    }
    return std::nullopt;
}

inline VerifyReport verify_engine(const BatchSpec& spec) {
    VerifyReport rep;
    const int total = spec.lattice + spec.cloud;
    if (total == 0) {
        rep.warning = "empty batch: nothing was checked";
        return rep;
    }
    auto fails = std::vector<std::optional<nlohmann::json>>(std::size_t(total));
    std::vector<std::size_t> checks(std::size_t(total), 0);
    std::vector<int> weak(std::size_t(total), -1);
    parallel_for(std::size_t(total), spec.threads, [&](std::size_t k) {
        const Instance in = int(k) < spec.lattice ? lattice_instance(spec.seed, int(k), spec.max_side)
                                                  : cloud_instance(spec.seed, int(k), spec.max_points);
        try {
            fails[k] = verify_instance(in, spec.hooks, checks[k], weak[k]);
        } catch (const std::exception& e) {
            fails[k] = counterexample_json("exception", in, e.what(), nullptr);
        }
    });
    rep.instances = std::size_t(total);
    for (int k = 0; k < total; ++k) {
        rep.checks += checks[k];
        rep.weak_equal += weak[k] == 0;
        rep.weak_above += weak[k] == 1;
        if (fails[k]) {
            if (rep.pass) rep.counterexample = *fails[k];
            rep.pass = false;
            ++rep.failures;
        }
    }
    return rep;
}

}  // namespace lppgap::oracle
