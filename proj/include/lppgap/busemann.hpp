#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lppgap/classify.hpp"
#include "lppgap/dimension.hpp"
#include "lppgap/gap.hpp"
#include "lppgap/lattice_dp.hpp"

// Semi-infinite objects realized through point-to-point problems toward
// far targets.  The direction theta from an origin (x0, t0) at horizon h
// means the target (x0 + theta h, t0 + h), snapped to a cell on lattices.
namespace lppgap {

struct DirectionTarget {
    double theta = 0, horizon = 0;
    SpaceTimePoint endpoint;
};

inline DirectionTarget direction_target(const Model& m, const SpaceTimePoint& origin, double theta, double h) {
    if (!(std::fabs(theta) < 1.0)) throw domain_error("direction outside the causal cone");
    if (!(h > 0)) throw parameter_error("horizon must be positive");
    DirectionTarget d{theta, h, {origin.x + theta * h, origin.t + h}};
    if (const auto* f = std::get_if<LatticeField>(&m)) {
        const int t = int(std::lround(origin.t + h));
        int x = int(std::lround(origin.x + theta * h));
        if (((t - x) & 1) != 0) x += (origin.x + theta * h >= x) ? 1 : -1;
        d.endpoint = {double(x), double(t)};
        if (!f->cell_at(d.endpoint)) throw domain_error("direction target outside the field");
        if (std::abs(x - int(origin.x)) >= t - int(origin.t)) throw domain_error("direction target on the light cone");
    }
    return d;
}

// Value between two points where the endpoints may coincide; the start's
// weight counts for lattices and for cloud points, anchors weigh nothing.
inline Value point_value(const Model& m, const SpaceTimePoint& a, const SpaceTimePoint& b) {
    if (const auto* f = std::get_if<LatticeField>(&m)) return lattice_value_pts(*f, a, b);
    return cloud_value(std::get<PoissonCloud>(m), a, b);
}

inline Value point_weight(const Model& m, const SpaceTimePoint& p) {
    if (const auto* f = std::get_if<LatticeField>(&m)) return f->at(f->require_cell(p));
    const auto& c = std::get<PoissonCloud>(m);
    return std::binary_search(c.points.begin(), c.points.end(), p, time_order) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------- Busemann values

struct Coalescence {
    bool found = false;  // merged strictly before the terminal node
    SpaceTimePoint point;
    double time = 0;
};

// First node of the longest common suffix of two chains ending at the same
// target, if that suffix holds more than the terminal node itself.
inline Coalescence chain_coalescence(const Chain& a, const Chain& b) {
    Coalescence c;
    std::size_t ka = a.ids.size(), kb = b.ids.size(), common = 0;
    while (ka > 0 && kb > 0 && a.ids[ka - 1] == b.ids[kb - 1]) {
        --ka;
        --kb;
        ++common;
    }
    const std::size_t need = a.anchored ? 1 : 2;  // lattice chains end on the target cell
    if (common >= need) {
        c.found = true;
        c.point = a.nodes[ka];
        c.time = c.point.t;
    }
    return c;
}

struct BusemannValue {
    Value value = 0;    // at horizon h
    Value value2 = 0;   // at horizon 2h
    bool certified = false;
    Coalescence coalescence;
};

// B(x) = L(x -> T) - L(origin -> T).  Certified when the side-geodesics from
// x and the origin to T_h merge at a node c that lies on optimal paths from
// both starts to T_2h; B is then L(x -> c) - L(origin -> c) at both horizons.
inline BusemannValue busemann(const Model& m, const SpaceTimePoint& origin, double theta, const SpaceTimePoint& x,
                              Side side, double h) {
    if (x.t != origin.t) throw parameter_error("Busemann start must share the origin's time");
    const auto T1 = direction_target(m, origin, theta, h).endpoint;
    const auto T2 = direction_target(m, origin, theta, 2 * h).endpoint;
    if (!causal_leq(x, T1) || !causal_leq(x, T2)) throw domain_error("start cannot reach the direction target");
    BusemannValue r;
    const Value lx1 = passage_value(m, {x, T1}), lo1 = passage_value(m, {origin, T1});
    const Value lx2 = passage_value(m, {x, T2}), lo2 = passage_value(m, {origin, T2});
    r.value = lx1 - lo1;
    r.value2 = lx2 - lo2;
    if (x == origin) {
        r.certified = true;
        r.coalescence = {true, origin, origin.t};
        return r;
    }
    const Chain gx = geodesic(m, {x, T1}, side), go = geodesic(m, {origin, T1}, side);
    r.coalescence = chain_coalescence(gx, go);
    if (!r.coalescence.found) return r;
    const auto c = r.coalescence.point;
    const Value wc = point_weight(m, c);
    const Value c2 = point_value(m, c, T2);
    r.certified = value_eq(lx2, point_value(m, x, c) + c2 - wc) && value_eq(lo2, point_value(m, origin, c) + c2 - wc);
    return r;
}

struct BusemannProfile {
    double theta = 0;
    Side side = Side::right;
    double horizon = 0;
    SpaceTimePoint origin;
    std::vector<double> xs;
    std::vector<Value> values, values2;
    std::vector<char> certified;
    std::vector<double> coalescence_time;  // NaN when none
};

// Lattice profile from two backward tables (targets at h and 2h).
inline BusemannProfile busemann_profile(const LatticeField& f, const SpaceTimePoint& origin, double theta,
                                        const std::vector<double>& xs, Side side, double h) {
    const Model mm = f;
    const auto T1 = direction_target(mm, origin, theta, h).endpoint;
    const auto T2 = direction_target(mm, origin, theta, 2 * h).endpoint;
    const int t0 = int(origin.t);
    int lo = int(origin.x), hi = int(origin.x);
    for (double x : xs) {
        f.require_cell({x, origin.t});
        lo = std::min(lo, int(x));
        hi = std::max(hi, int(x));
    }
    const auto b1 = lattice::backward_table(f, int(T1.x), int(T1.t), t0, lo, hi);
    const auto b2 = lattice::backward_table(f, int(T2.x), int(T2.t), t0, lo, hi);
    const bool right = side == Side::right;
    BusemannProfile p;
    p.theta = theta;
    p.side = side;
    p.horizon = h;
    p.origin = origin;
    p.xs = xs;
    const int ox = int(origin.x);
    if (!b1.has(ox, t0) || !b2.has(ox, t0)) throw domain_error("origin cannot reach the direction target");
    const auto path0 = lattice::trace_forward(f, b1, ox, t0, right);
    for (double xd : xs) {
        const int x = int(xd);
        if (!b1.has(x, t0) || !b2.has(x, t0)) throw domain_error("start cannot reach the direction target");
        p.values.push_back(b1.at(x, t0) - b1.at(ox, t0));
        p.values2.push_back(b2.at(x, t0) - b2.at(ox, t0));
        if (x == ox) {
            p.certified.push_back(1);
            p.coalescence_time.push_back(origin.t);
            continue;
        }
        const auto path = lattice::trace_forward(f, b1, x, t0, right);
        int k = int(path.size()) - 1;
        while (k > 0 && path[k - 1] == path0[k - 1]) --k;
        if (k >= int(path.size()) - 1) {
            p.certified.push_back(0);
            p.coalescence_time.push_back(std::nan(""));
            continue;
        }
        const int ct = t0 + k, cx = path[k];
        const Value wc = lattice::weight(f, cx, ct);
        auto on_route = [&](int s) {
            const Value to_c = b1.at(s, t0) - b1.at(cx, ct) + wc;
            return value_eq(b2.at(s, t0), to_c + b2.at(cx, ct) - wc);
        };
        p.certified.push_back(on_route(x) && on_route(ox));
        p.coalescence_time.push_back(double(ct));
    }
    return p;
}

// Generic profile by pointwise evaluation.
inline BusemannProfile busemann_profile(const Model& m, const SpaceTimePoint& origin, double theta,
                                        const std::vector<double>& xs, Side side, double h) {
    if (const auto* f = std::get_if<LatticeField>(&m)) return busemann_profile(*f, origin, theta, xs, side, h);
    BusemannProfile p;
    p.theta = theta;
    p.side = side;
    p.horizon = h;
    p.origin = origin;
    p.xs = xs;
    for (double x : xs) {
        const auto b = busemann(m, origin, theta, {x, origin.t}, side, h);
        p.values.push_back(b.value);
        p.values2.push_back(b.value2);
        p.certified.push_back(b.certified);
        p.coalescence_time.push_back(b.coalescence.found ? b.coalescence.time : std::nan(""));
    }
    return p;
}

// ---------------------------------------------------------------- exceptional directions

struct ExceptionalDirection {
    double theta = 0;
    SpaceTimePoint below, above;     // witness targets at the horizon
    std::vector<int> witness_left;   // rightmost geodesic to `below`, positions by time
    std::vector<int> witness_right;  // leftmost geodesic to `above`
    int mid_left = 0, mid_right = 0;
    double separation = 0;
};

struct ScanSpec {
    SpaceTimePoint origin;
    double theta_lo = -0.5, theta_hi = 0.5;
    int horizon = 200;
    int mid_time = 100;  // offset from the origin's time
    int coarse_step = 8;  // target cells between coarse probes (even)
    double threshold_factor = 1.0;  // jump threshold = factor * mid_time^{2/3}
};

// Mid-time positions of the leftmost and rightmost geodesics from the origin
// to the target (y, t0 + h).
struct MidProbe {
    int left = 0, right = 0;
    std::vector<int> left_path, right_path;
};

inline MidProbe mid_probe(const LatticeField& f, const SpaceTimePoint& origin, int y, int h, int mid) {
    const int t0 = int(origin.t), ox = int(origin.x);
    const auto bw = lattice::backward_table(f, y, t0 + h, t0, ox, ox);
    if (!bw.has(ox, t0)) throw domain_error("scan target unreachable from the origin");
    MidProbe p;
    p.left_path = lattice::trace_forward(f, bw, ox, t0, false);
    p.right_path = lattice::trace_forward(f, bw, ox, t0, true);
    p.left = p.left_path[mid];
    p.right = p.right_path[mid];
    return p;
}

// Jumps of the target -> mid-position map.  Each target carries the interval
// [left, right] of its extremal geodesics' mid positions, and these intervals
// are ordered in the target.  A jump is a gap above the threshold either
// between consecutive targets or inside one target (a tie between
// macroscopically separated geodesics, reported with pL = pR).  Targets are
// probed every coarse_step cells and a flagged interval is bisected down to
// adjacent targets, following the largest gap.
inline std::vector<ExceptionalDirection> exceptional_scan(const LatticeField& f, const ScanSpec& s) {
    if (s.mid_time <= 0 || s.mid_time >= s.horizon) throw parameter_error("mid time must lie inside the horizon");
    if (s.coarse_step < 2 || s.coarse_step % 2) throw parameter_error("coarse step must be even and >= 2");
    const Model mm = f;
    const int h = s.horizon;
    const int ylo = int(direction_target(mm, s.origin, s.theta_lo, h).endpoint.x);
    const int yhi = int(direction_target(mm, s.origin, s.theta_hi, h).endpoint.x);
    const double thr = s.threshold_factor * std::pow(double(s.mid_time), 2.0 / 3.0);
    std::vector<ExceptionalDirection> out;
    auto report = [&](int a, const MidProbe& pa, int b, const MidProbe& pb, bool tie) {
        ExceptionalDirection e;
        e.below = {double(a), s.origin.t + h};
        e.above = {double(b), s.origin.t + h};
        e.theta = ((a + b) / 2.0 - s.origin.x) / h;
        e.witness_left = tie ? pa.left_path : pa.right_path;
        e.witness_right = pb.left_path;
        if (tie) e.witness_right = pa.right_path;
        e.mid_left = tie ? pa.left : pa.right;
        e.mid_right = tie ? pa.right : pb.left;
        e.separation = e.mid_right - e.mid_left;
        out.push_back(std::move(e));
    };
    std::vector<int> ys;
    for (int y = ylo; y < yhi; y += s.coarse_step) ys.push_back(y);
    ys.push_back(yhi);
    std::vector<MidProbe> probes;
    for (int y : ys) probes.push_back(mid_probe(f, s.origin, y, h, s.mid_time));
    for (std::size_t k = 0; k < ys.size(); ++k) {
        if (probes[k].right - probes[k].left > thr) report(ys[k], probes[k], ys[k], probes[k], true);
        if (k + 1 == ys.size() || probes[k + 1].left - probes[k].right <= thr) continue;
        int a = ys[k], b = ys[k + 1];
        MidProbe pa = probes[k], pb = probes[k + 1];
        bool tie = false;
        while (b - a > 2) {
            int c = a + ((b - a) / 4) * 2;
            if (c == a) c = a + 2;
            const auto pc = mid_probe(f, s.origin, c, h, s.mid_time);
            const int below = pc.left - pa.right, inside = pc.right - pc.left, above = pb.left - pc.right;
            if (inside >= below && inside >= above) {
                a = b = c;
                pa = pb = pc;
                tie = true;
                break;
            }
            if (below >= above) {
                b = c;
                pb = pc;
            } else {
                a = c;
                pa = pc;
            }
        }
        const double sep = tie ? pa.right - pa.left : pb.left - pa.right;
        if (sep <= thr) continue;
        report(a, pa, b, pb, tie);
    }
    return out;
}

// ---------------------------------------------------------------- Busemann gap

// L(x -> pL) + L(x -> pR) - disjoint2(x^2 -> (pL, pR)); reduces to the gap when pL = pR.
inline std::optional<Value> busemann_gap_value(const Model& m, const SpaceTimePoint& x, const SpaceTimePoint& pl,
                                               const SpaceTimePoint& pr) {
    const auto d2 = disjoint2_value(m, doubled(x), EndpointPair{pl, pr});
    if (!d2) return std::nullopt;
    return passage_value(m, {x, pl}) + passage_value(m, {x, pr}) - *d2;
}

// Extremal pair of disjoint lattice paths from a doubled start to a pair of
// targets at one time, by backtracking stored two-path tables.  Positions are
// indexed by time t0..t_end.
struct LatticePair {
    Value value = 0;
    std::vector<int> left, right;
    std::vector<Value> head;  // best pair value into (left[t], right[t]); head[0] = 2 w(x)
};

template <class V>
std::optional<LatticePair> lattice_pair_optimizer_impl(const LatticeField& f, int x, int t0, int yl, int yr,
                                                       int t_end, Side side) {
    std::vector<lattice::PairTable<V>> tabs;
    lattice::TwoPathSpec spec{t0, x, x, t_end, yl, yr};
    lattice::two_path_sweep<V>(f, spec, [&](const lattice::PairTable<V>& t) { tabs.push_back(t); });
    if (tabs.empty()) return std::nullopt;
    const bool dbl_end = yl == yr;
    int a = dbl_end ? yl - 1 : yl, b = dbl_end ? yr + 1 : yr;
    int ti = dbl_end ? int(tabs.size()) - 2 : int(tabs.size()) - 1;
    if (ti < 0) return std::nullopt;
    auto v = tabs[ti].at(a, b);
    if (!v) return std::nullopt;
    LatticePair out;
    const int n = t_end - t0;
    out.left.assign(std::size_t(n + 1), 0);
    out.right.assign(std::size_t(n + 1), 0);
    out.head.assign(std::size_t(n + 1), 0);
    out.left[0] = out.right[0] = x;
    out.head[0] = 2 * lattice::weight(f, x, t0);
    out.left[n] = yl;
    out.right[n] = yr;
    out.value = *v + (dbl_end ? 2 * lattice::weight(f, yl, t_end) : 0.0);
    out.head[n] = out.value;
    Value cur = *v;
    const bool right = side == Side::right;
    for (;;) {
        const int t = tabs[ti].t;
        out.left[t - t0] = a;
        out.right[t - t0] = b;
        out.head[t - t0] = cur;
        if (ti == 0) break;
        const Value need = cur - lattice::weight(f, a, t) - lattice::weight(f, b, t);
        int best_a = 0, best_b = 0;
        bool any = false;
        std::vector<std::pair<int, int>> ok;
        for (int da : {-1, 1})
            for (int db : {-1, 1}) {
                const auto pv = tabs[ti - 1].at(a + da, b + db);
                if (pv && value_eq(*pv, need)) ok.push_back({a + da, b + db});
            }
        for (auto [pa, pb] : ok) {
            if (!any) {
                best_a = pa;
                best_b = pb;
                any = true;
            } else if (right) {
                best_a = std::max(best_a, pa);
                best_b = std::max(best_b, pb);
            } else {
                best_a = std::min(best_a, pa);
                best_b = std::min(best_b, pb);
            }
        }
        if (!any) throw domain_error("two-path backtrack lost the optimum");
        if (std::find(ok.begin(), ok.end(), std::pair<int, int>{best_a, best_b}) == ok.end()) {
            // No componentwise extreme; fall back to the lexicographic one.
            std::sort(ok.begin(), ok.end(), [&](auto p, auto q) {
                return right ? (p.second > q.second || (p.second == q.second && p.first > q.first))
                             : (p.first < q.first || (p.first == q.first && p.second < q.second));
            });
            best_a = ok[0].first;
            best_b = ok[0].second;
        }
        a = best_a;
        b = best_b;
        cur = need;
        --ti;
    }
    return out;
}

inline std::optional<LatticePair> lattice_pair_optimizer(const LatticeField& f, int x, int t0, int yl, int yr,
                                                         int t_end, Side side) {
    if (yl > yr) throw parameter_error("target pair must be ordered");
    if (t_end - t0 < 2) throw parameter_error("pair optimizer needs at least two steps");
    if (lattice::int_kernel_ok(f, t_end - t0))
        return lattice_pair_optimizer_impl<std::int32_t>(f, x, t0, yl, yr, t_end, side);
    return lattice_pair_optimizer_impl<double>(f, x, t0, yl, yr, t_end, side);
}

// Best disjoint pair value from x doubled to (yl, yr) at t_end.
inline std::optional<Value> lattice_pair_value(const LatticeField& f, int x, int t0, int yl, int yr, int t_end) {
    std::optional<Value> out;
    const bool dbl = yl == yr;
    auto take = [&]<class V>(const lattice::PairTable<V>& t) {
        if (!dbl && t.t == t_end) out = t.at(yl, yr);
        if (dbl && t.t == t_end - 1) {
            const auto v = t.at(yl - 1, yr + 1);
            if (v) out = *v + 2 * lattice::weight(f, yl, t_end);
        }
    };
    lattice::TwoPathSpec spec{t0, x, x, t_end, yl, yr};
    if (lattice::int_kernel_ok(f, t_end - t0)) lattice::two_path_sweep<std::int32_t>(f, spec, take);
    else lattice::two_path_sweep<double>(f, spec, take);
    return out;
}

struct BusemannGapProfile {
    double theta = 0;
    double horizon = 0;
    SpaceTimePoint origin;
    SpaceTimePoint pl, pr, pl2, pr2;  // anchors at h and 2h
    bool anchors_match = false;        // 2h witnesses branch at the same node
    std::vector<double> xs;
    std::vector<Value> values, values2;
    std::vector<char> certified;
    std::vector<double> coalescence_left, coalescence_right;  // with the witnesses, NaN if none
    std::vector<double> proof_time;  // time of a decomposition proving invariance, NaN if none
};

// G^(x) at horizons h and 2h, anchored on the witness targets of an
// exceptional direction; the 2h anchors straddle the same split node.  A
// value is certified when x's rightmost geodesic to pL and leftmost geodesic
// to pR coalesce with the witnesses (at nodes that stay optimal toward the 2h
// anchors) and the two horizons agree.  proof_time records a stronger check:
// a time where the rightmost 2-optimizer splits into a head plus geodesic
// tails at both horizons, which forces both values to equal
// L(x -> a) + L(x -> b) - head(a, b).
inline BusemannGapProfile busemann_gap(const LatticeField& f, const SpaceTimePoint& origin,
                                       const ExceptionalDirection& e, const std::vector<double>& xs) {
    const int t0 = int(origin.t), ox = int(origin.x);
    const int h = int(e.below.t) - t0;
    BusemannGapProfile p;
    p.theta = e.theta;
    p.horizon = h;
    p.origin = origin;
    p.pl = e.below;
    p.pr = e.above;
    const int l1 = int(e.below.x), r1 = int(e.above.x);
    // The witnesses leave their last common node s* as (split_x - 1, split_x + 1).  The
    // 2h anchors are the last target whose rightmost geodesic from the
    // origin passes weakly left of split_x - 1 one step after s*, and its right
    // neighbour; they match when both 2h witnesses branch at s* as well.
    int k = 0;
    while (k + 1 < int(e.witness_left.size()) && e.witness_left[k + 1] == e.witness_right[k + 1]) ++k;
    if (k + 1 >= int(e.witness_left.size())) throw parameter_error("witness geodesics never split");
    const int split_x = e.witness_left[k];
    int lo_y = ox - 2 * h + 2, hi_y = ox + 2 * h - 2;
    while (!f.cell_at({double(lo_y), double(t0 + 2 * h)}) && lo_y < hi_y) lo_y += 2;
    while (!f.cell_at({double(hi_y), double(t0 + 2 * h)}) && hi_y > lo_y) hi_y -= 2;
    auto path2 = [&](int y, bool right) {
        const auto bw = lattice::backward_table(f, y, t0 + 2 * h, t0, ox, ox);
        if (!bw.has(ox, t0)) throw domain_error("2h target unreachable from the origin");
        return lattice::trace_forward(f, bw, ox, t0, right);
    };
    auto left_of_split = [&](int y) { return path2(y, true)[k + 1] <= split_x - 1; };
    int a = lo_y, b = hi_y;
    if (!left_of_split(a)) throw domain_error("no 2h anchor left of the split");
    if (left_of_split(b)) throw domain_error("no 2h anchor right of the split");
    while (b - a > 2) {
        const int c = a + ((b - a) / 4) * 2;
        (left_of_split(c) ? a : b) = c;
    }
    const int l2 = a, r2 = a + 2;
    p.pl2 = {double(l2), double(t0 + 2 * h)};
    p.pr2 = {double(r2), double(t0 + 2 * h)};
    const auto wl2 = path2(l2, true), wr2 = path2(r2, false);
    p.anchors_match = wl2[k] == split_x && wr2[k] == split_x && wl2[k + 1] == split_x - 1 && wr2[k + 1] == split_x + 1;
    int lo = ox, hi = ox;
    for (double x : xs) {
        lo = std::min(lo, int(x));
        hi = std::max(hi, int(x));
    }
    const auto bl1 = lattice::backward_table(f, l1, t0 + h, t0, lo, hi);
    const auto br1 = lattice::backward_table(f, r1, t0 + h, t0, lo, hi);
    const auto bl2 = lattice::backward_table(f, l2, t0 + 2 * h, t0, lo, hi);
    const auto br2 = lattice::backward_table(f, r2, t0 + 2 * h, t0, lo, hi);
    p.xs = xs;
    for (double xd : xs) {
        const int x = int(xd);
        f.require_cell({xd, origin.t});
        const Value xl1 = bl1.at(x, t0), xr1 = br1.at(x, t0), xl2 = bl2.at(x, t0), xr2 = br2.at(x, t0);
        const auto d1 = lattice_pair_optimizer(f, x, t0, l1, r1, t0 + h, Side::right);
        const auto d2 = lattice_pair_value(f, x, t0, l2, r2, t0 + 2 * h);
        const bool ok1 = d1 && std::isfinite(xl1) && std::isfinite(xr1);
        const bool ok2 = d2 && std::isfinite(xl2) && std::isfinite(xr2);
        p.values.push_back(ok1 ? xl1 + xr1 - d1->value : undefined_value);
        p.values2.push_back(ok2 ? xl2 + xr2 - *d2 : undefined_value);
        if (!ok1 || !ok2) {
            p.certified.push_back(0);
            p.coalescence_left.push_back(std::nan(""));
            p.coalescence_right.push_back(std::nan(""));
            p.proof_time.push_back(std::nan(""));
            continue;
        }
        // Coalescence of x's side-geodesic with a witness before the horizon,
        // at a node that stays on optimal routes from x and the origin to the
        // 2h anchor.
        auto coalesce = [&](const lattice::DiagTable& b1, const lattice::DiagTable& b2,
                            const std::vector<int>& wit, bool right) -> double {
            if (x == ox) return origin.t;
            const auto path = lattice::trace_forward(f, b1, x, t0, right);
            int k = h;
            while (k > 0 && path[k - 1] == wit[k - 1]) --k;
            if (k >= h) return std::nan("");
            const int cx = path[k], ct = t0 + k;
            if (!b2.has(cx, ct)) return std::nan("");
            for (int src : {x, ox})
                if (!value_eq(b2.at(src, t0), b1.at(src, t0) - b1.at(cx, ct) + b2.at(cx, ct))) return std::nan("");
            return double(ct);
        };
        const double cl = coalesce(bl1, bl2, e.witness_left, true);
        const double cr = coalesce(br1, br2, e.witness_right, false);
        p.coalescence_left.push_back(cl);
        p.coalescence_right.push_back(cr);
        p.certified.push_back(!std::isnan(cl) && !std::isnan(cr) && value_eq(p.values.back(), p.values2.back()));
        // Proof of horizon invariance: some time s of the rightmost
        // 2-optimizer tau = (a, b) where tau splits into its head plus
        // geodesic tails at both horizons, with a and b on geodesics from x.
        const auto fx = lattice::forward_table(f, x, t0, t0 + h, l1, r1);
        double when = std::nan("");
        for (int sc = h; sc >= 1 && std::isnan(when); --sc) {
            const int t = t0 + sc, a = d1->left[sc], b = d1->right[sc];
            const Value wa = lattice::weight(f, a, t), wb = lattice::weight(f, b, t);
            if (!bl1.has(a, t) || !br1.has(b, t) || !bl2.has(a, t) || !br2.has(b, t)) continue;
            const Value head = d1->head[sc];
            if (!value_eq(d1->value, head + bl1.at(a, t) + br1.at(b, t) - wa - wb)) continue;
            if (!value_eq(*d2, head + bl2.at(a, t) + br2.at(b, t) - wa - wb)) continue;
            const Value la = fx.at(a, t), lb = fx.at(b, t);
            if (value_eq(xl1, la + bl1.at(a, t) - wa) && value_eq(xr1, lb + br1.at(b, t) - wb) &&
                value_eq(xl2, la + bl2.at(a, t) - wa) && value_eq(xr2, lb + br2.at(b, t) - wb))
                when = double(t);
        }
        p.proof_time.push_back(when);
    }
    return p;
}

// ---------------------------------------------------------------- semi-infinite classification

enum class SemiInfiniteType { IIa, III, IV, Va, Vb, other };

inline std::string semi_infinite_name(SemiInfiniteType t) {
    static const char* names[] = {"IIa_inf", "III_inf", "IV_inf", "Va_inf", "Vb_inf", "other"};
    return names[int(t)];
}

struct SemiInfiniteClass {
    SemiInfiniteType dictionary = SemiInfiniteType::other;
    SemiInfiniteType geometric = SemiInfiniteType::other;
};

// Dictionary side from the profile of G^ on its grid: for G^ > 0 a strict
// plateau minimum gives III, otherwise IIa; for G^ = 0 isolation of the zero
// set on each side (within `radius` grid steps) gives IV/Va/Vb.  Geometric
// side from the leftmost geodesic to pL and the rightmost geodesic to pR.
inline SemiInfiniteClass classify_semi_infinite(const Model& m, const BusemannGapProfile& prof, int k,
                                                int radius = 1) {
    SemiInfiniteClass out;
    const int n = int(prof.xs.size());
    if (k < 0 || k >= n) throw parameter_error("point is not on the profile grid");
    const Value g = prof.values[k];
    if (is_defined(g) && k > 0 && k < n - 1) {
        if (g != 0) {
            out.dictionary = strict_min_at(prof.values, k) ? SemiInfiniteType::III : SemiInfiniteType::IIa;
        } else {
            bool left_zero = false, right_zero = false;
            for (int d = 1; d <= radius; ++d) {
                if (k - d >= 0 && prof.values[k - d] == 0) left_zero = true;
                if (k + d < n && prof.values[k + d] == 0) right_zero = true;
            }
            if (left_zero && right_zero) out.dictionary = SemiInfiniteType::IV;
            else if (!left_zero && right_zero) out.dictionary = SemiInfiniteType::Va;
            else if (left_zero && !right_zero) out.dictionary = SemiInfiniteType::Vb;
        }
    }
    const SpaceTimePoint x{prof.xs[k], prof.origin.t};
    const auto nl = network(m, {x, prof.pl});
    const auto nr = network(m, {x, prof.pr});
    const Chain& gl = nl.leftmost;
    const Chain& gr = nr.rightmost;
    // Common nodes in time order, skipping the start.
    std::vector<std::int64_t> common;
    for (std::size_t a = 0; a < gl.ids.size(); ++a)
        if (std::find(gr.ids.begin(), gr.ids.end(), gl.ids[a]) != gr.ids.end()) common.push_back(gl.ids[a]);
    // Past the last node the chains head for different targets.
    auto succ_of = [](const Chain& c, std::int64_t id, std::int64_t end_tag) {
        const auto it = std::find(c.ids.begin(), c.ids.end(), id);
        return it + 1 == c.ids.end() ? end_tag : *(it + 1);
    };
    const std::size_t start_shared = gl.anchored ? 0 : 1;  // lattice chains include the start cell
    if (common.size() <= start_shared) {
        // Disjoint from the start: look for bridges inside each target's network.
        auto bridge = [&](const GeodesicNetwork& net, const Chain& from, const Chain& to) {
            const int nn = int(net.nodes.size());
            std::vector<char> src(nn, 0), dst(nn, 0), reach(nn, 0);
            for (int v = 0; v < nn; ++v) {
                if (v == net.source || v == net.sink || net.ids[v] < 0) continue;
                const auto id = net.ids[v];
                src[v] = std::find(from.ids.begin(), from.ids.end(), id) != from.ids.end();
                dst[v] = std::find(to.ids.begin(), to.ids.end(), id) != to.ids.end();
            }
            for (int v = 0; v < nn; ++v) {
                if (reach[v] && dst[v]) return true;
                if (reach[v] || src[v])
                    for (int s : net.succ[v]) reach[s] = 1;
            }
            return false;
        };
        const bool lr = bridge(nr, gl, gr);
        const bool rl = bridge(nl, gr, gl);
        if (!lr && !rl) out.geometric = SemiInfiniteType::IV;
        else if (lr && !rl) out.geometric = SemiInfiniteType::Va;
        else if (!lr && rl) out.geometric = SemiInfiniteType::Vb;
        return out;
    }
    // Shared stretches: IIa when the shared part is one initial segment, III
    // when the paths split at the start and rejoin before the final split.
    const bool initial_shared = gl.anchored ? (!gl.ids.empty() && !gr.ids.empty() && gl.ids[0] == gr.ids[0])
                                            : (gl.ids.size() > 1 && gr.ids.size() > 1 && gl.ids[1] == gr.ids[1]);
    int splits = 0;
    for (std::size_t k2 = 0; k2 < common.size(); ++k2)
        if (succ_of(gl, common[k2], -3) != succ_of(gr, common[k2], -4)) ++splits;
    if (gl.anchored && !initial_shared) ++splits;  // cloud chains omit the shared start
    if (initial_shared && splits == 1) out.geometric = SemiInfiniteType::IIa;
    else if (!initial_shared && splits == 2) out.geometric = SemiInfiniteType::III;
    return out;
}

// ---------------------------------------------------------------- two-path Busemann

// disjoint2(x^2 -> (T1, T2)) - L(origin -> T1) - L(origin -> T2) at horizon h.
inline std::optional<Value> two_path_busemann(const Model& m, const SpaceTimePoint& origin, double theta1,
                                              double theta2, const SpaceTimePoint& x, double h) {
    if (!(theta1 < theta2)) throw parameter_error("two-path Busemann needs theta1 < theta2");
    const auto T1 = direction_target(m, origin, theta1, h).endpoint;
    const auto T2 = direction_target(m, origin, theta2, h).endpoint;
    const auto d2 = disjoint2_value(m, doubled(x), EndpointPair{T1, T2});
    if (!d2) return std::nullopt;
    return *d2 - passage_value(m, {origin, T1}) - passage_value(m, {origin, T2});
}

struct IdentityResidual {
    Value residual = 0;
    bool provisional = true;
};

// G^(x) - [B_L^{theta1}(x) + B_R^{theta2}(x) - BB^{theta1,theta2}(x)] with all
// terms at horizon h; provisional unless the Busemann terms are certified.
inline std::optional<IdentityResidual> horizon_identity_residual(const Model& m, const SpaceTimePoint& origin,
                                                                 const SpaceTimePoint& pl, const SpaceTimePoint& pr,
                                                                 double theta1, double theta2,
                                                                 const SpaceTimePoint& x, double h) {
    const auto g = busemann_gap_value(m, x, pl, pr);
    const auto bb = two_path_busemann(m, origin, theta1, theta2, x, h);
    if (!g || !bb) return std::nullopt;
    const auto bl = busemann(m, origin, theta1, x, Side::left, h);
    const auto br = busemann(m, origin, theta2, x, Side::right, h);
    IdentityResidual r;
    r.residual = *g - (bl.value + br.value - *bb);
    r.provisional = !(bl.certified && br.certified);
    return r;
}

// ---------------------------------------------------------------- stationary horizon tests

struct DirectionStats {
    double theta = 0;
    double drift = 0;         // mean certified increment per unit x
    LinearFit variance_fit;   // increment variance against lag
    std::size_t certified = 0, total = 0;
    std::size_t horizon_mismatch = 0;  // certified values that differ at 2h
};

struct StationaryReport {
    std::vector<DirectionStats> directions;
    std::size_t quadruples = 0, violations = 0;
    std::vector<std::array<double, 4>> violation_log;  // theta1, theta2, x1, x2
    double local_constancy = 1.0;
    std::size_t constancy_samples = 0;
};

// (a) drift and variance regression of certified increments per direction,
// (b) quadrangle inequality B1(x2) - B1(x1) <= B2(x2) - B2(x1) on certified
// values for theta1 < theta2 and x1 < x2, (c) the fraction of grid points
// where B^theta = B^{theta+delta} (both certified).
inline StationaryReport stationary_horizon_tests(const std::vector<BusemannProfile>& profiles,
                                                 const std::vector<BusemannProfile>& shifted = {},
                                                 int max_lag = 10) {
    StationaryReport rep;
    for (const auto& p : profiles) {
        DirectionStats d;
        d.theta = p.theta;
        d.total = p.xs.size();
        std::vector<double> lags, vars;
        double num = 0, den = 0;
        for (std::size_t k = 0; k < p.xs.size(); ++k) {
            if (!p.certified[k]) continue;
            ++d.certified;
            d.horizon_mismatch += !value_eq(p.values[k], p.values2[k]);
        }
        for (int lag = 1; lag <= max_lag; ++lag) {
            double s = 0, s2 = 0;
            std::size_t c = 0;
            for (std::size_t k = 0; k + lag < p.xs.size(); ++k) {
                if (!p.certified[k] || !p.certified[k + lag]) continue;
                const double inc = p.values[k + lag] - p.values[k];
                s += inc;
                s2 += inc * inc;
                ++c;
                if (lag == 1) {
                    num += inc;
                    den += p.xs[k + 1] - p.xs[k];
                }
            }
            if (c < 2) continue;
            const double mean = s / double(c);
            lags.push_back(lag * (p.xs.size() > 1 ? p.xs[1] - p.xs[0] : 1.0));
            vars.push_back((s2 - double(c) * mean * mean) / double(c - 1));
        }
        d.drift = den > 0 ? num / den : 0.0;
        d.variance_fit = linear_fit(lags, vars);
        rep.directions.push_back(d);
    }
    for (std::size_t a = 0; a < profiles.size(); ++a)
        for (std::size_t b = 0; b < profiles.size(); ++b) {
            const auto& p1 = profiles[a];
            const auto& p2 = profiles[b];
            if (!(p1.theta < p2.theta) || p1.xs != p2.xs) continue;
            for (std::size_t i = 0; i < p1.xs.size(); ++i)
                for (std::size_t j = i + 1; j < p1.xs.size(); ++j) {
                    if (!p1.certified[i] || !p1.certified[j] || !p2.certified[i] || !p2.certified[j]) continue;
                    ++rep.quadruples;
                    if (p1.values[j] - p1.values[i] > p2.values[j] - p2.values[i] + 1e-9) {
                        ++rep.violations;
                        rep.violation_log.push_back({p1.theta, p2.theta, p1.xs[i], p1.xs[j]});
                    }
                }
        }
    std::size_t same = 0;
    for (std::size_t a = 0; a < shifted.size() && a < profiles.size(); ++a)
        for (std::size_t k = 0; k < profiles[a].xs.size(); ++k) {
            if (!profiles[a].certified[k] || !shifted[a].certified[k]) continue;
            ++rep.constancy_samples;
            same += value_eq(profiles[a].values[k], shifted[a].values[k]);
        }
    if (rep.constancy_samples) rep.local_constancy = double(same) / double(rep.constancy_samples);
    return rep;
}

// ---------------------------------------------------------------- reflected walk diagnostics

struct ReflectedWalkReport {
    DimensionEstimate zero_dimension;
    LinearFit increment_fit;  // variance against lag on zero-free stretches
    std::vector<double> lags, variances;
    bool nonnegative = true;
    std::size_t zeros = 0, points = 0;
    std::string warning;
};

// Diagnostics of a profile (undefined entries skipped): box dimension of its
// zero set in grid units scaled to [0, 1], variance of increments over
// zero-free windows against lag, and the sign check.
inline ReflectedWalkReport reflected_walk_diag(const std::vector<double>& values, const std::vector<int>& lags,
                                               int scale_levels = 5) {
    ReflectedWalkReport r;
    const std::size_t n = values.size();
    std::vector<double> zs;
    for (std::size_t k = 0; k < n; ++k) {
        if (!is_defined(values[k])) continue;
        ++r.points;
        if (values[k] < 0) r.nonnegative = false;
        if (values[k] == 0) zs.push_back(double(k) / double(n));
    }
    r.zeros = zs.size();
    if (r.points < 64) r.warning = "profile has fewer than 64 defined points";
    r.zero_dimension = box_dimension(zs, dyadic_scales(1.0, 1, scale_levels));
    for (int lag : lags) {
        double s = 0, s2 = 0;
        std::size_t c = 0;
        for (std::size_t k = 0; k + lag < n; ++k) {
            bool clean = true;
            for (std::size_t q = k; q <= k + lag && clean; ++q) clean = is_defined(values[q]) && values[q] > 0;
            if (!clean) continue;
            const double inc = values[k + lag] - values[k];
            s += inc;
            s2 += inc * inc;
            ++c;
        }
        if (c < 2) continue;
        const double mean = s / double(c);
        r.lags.push_back(lag);
        r.variances.push_back((s2 - double(c) * mean * mean) / double(c - 1));
    }
    r.increment_fit = linear_fit(r.lags, r.variances);
    return r;
}

inline ReflectedWalkReport reflected_walk_diag(const BusemannGapProfile& p, const std::vector<int>& lags,
                                               int scale_levels = 5) {
    std::vector<double> v(p.values.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = p.certified[k] ? p.values[k] : undefined_value;
    return reflected_walk_diag(v, lags, scale_levels);
}

}  // namespace lppgap
