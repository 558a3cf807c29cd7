#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lppgap/gap.hpp"

namespace lppgap {

enum class NetworkType { I, IIa, IIb, III, IV, Va, Vb, other };

inline constexpr int network_type_count = 8;

inline std::string type_name(NetworkType t) {
    static const char* names[] = {"I", "IIa", "IIb", "III", "IV", "Va", "Vb", "other"};
    return names[int(t)];
}

inline NetworkType type_from_name(const std::string& s) {
    for (int k = 0; k < network_type_count; ++k)
        if (type_name(NetworkType(k)) == s) return NetworkType(k);
    throw parameter_error("unknown network type: " + s);
}

inline bool is_zero_type(NetworkType t) {
    return t == NetworkType::IV || t == NetworkType::Va || t == NetworkType::Vb;
}

struct GeometricDetail {
    NetworkType type = NetworkType::other;
    bool initial_split = false, terminal_split = false, middle_split = false;
    bool disjoint_interior = false;  // leftmost and rightmost share no interior node
    bool bridge_lr = false, bridge_rl = false;
    bool three_star = false;  // source or sink of degree above 2
};

// Shape of the network read off its leftmost and rightmost geodesics.  The
// two share a sequence of common nodes; a stretch between consecutive common
// nodes where they differ is a split.  Bridges are optimal paths from an
// interior node of one extremal geodesic to an interior node of the other.
inline GeometricDetail classify_geometric_detail(const GeodesicNetwork& net) {
    GeometricDetail d;
    const int n = int(net.nodes.size());
    if (net.succ[net.source].size() > 2 || net.pred[net.sink].size() > 2) {
        d.three_star = true;
        d.type = NetworkType::other;
        return d;
    }
    const auto& lp = net.left_path;
    const auto& rp = net.right_path;
    std::vector<char> on_l(n, 0), on_r(n, 0);
    for (int v : lp) on_l[v] = 1;
    for (int v : rp) on_r[v] = 1;
    std::vector<int> common;
    for (int v : lp)
        if (on_r[v]) common.push_back(v);
    // Split between consecutive common nodes unless both paths take the same edge.
    auto next_on = [](const std::vector<int>& p, int v) {
        const auto it = std::find(p.begin(), p.end(), v);
        return *(it + 1);
    };
    const int segs = int(common.size()) - 1;
    std::vector<char> split(std::size_t(std::max(segs, 0)), 0);
    for (int k = 0; k < segs; ++k) {
        const int a = common[k], b = common[k + 1];
        split[k] = !(next_on(lp, a) == b && next_on(rp, a) == b);
    }
    if (segs == 1 && split[0]) {
        d.disjoint_interior = true;
        std::vector<char> reach(n, 0);
        auto sweep = [&](const std::vector<char>& from, const std::vector<char>& to) {
            // Nodes are in topological order, so one forward pass suffices.
            std::fill(reach.begin(), reach.end(), 0);
            for (int v = 0; v < n; ++v) {
                if (reach[v] && to[v] && v != net.sink) return true;
                if (reach[v] || (from[v] && v != net.source))
                    for (int s : net.succ[v]) reach[s] = 1;
            }
            return false;
        };
        std::vector<char> l_only(n, 0), r_only(n, 0);
        for (int v = 0; v < n; ++v) {
            l_only[v] = on_l[v] && !on_r[v];
            r_only[v] = on_r[v] && !on_l[v];
        }
        d.bridge_lr = sweep(l_only, r_only);
        d.bridge_rl = sweep(r_only, l_only);
        if (!d.bridge_lr && !d.bridge_rl) d.type = NetworkType::IV;
        else if (d.bridge_lr && !d.bridge_rl) d.type = NetworkType::Va;
        else if (!d.bridge_lr && d.bridge_rl) d.type = NetworkType::Vb;
        else d.type = NetworkType::other;
        return d;
    }
    for (int k = 0; k < segs; ++k) {
        if (!split[k]) continue;
        if (k == 0) d.initial_split = true;
        else if (k == segs - 1) d.terminal_split = true;
        else d.middle_split = true;
    }
    if (d.middle_split) d.type = NetworkType::other;
    else if (d.initial_split && d.terminal_split) d.type = NetworkType::III;
    else if (d.terminal_split) d.type = NetworkType::IIa;
    else if (d.initial_split) d.type = NetworkType::IIb;
    else d.type = NetworkType::I;
    return d;
}

inline NetworkType classify_geometric(const GeodesicNetwork& net) { return classify_geometric_detail(net).type; }

struct GapDetail {
    NetworkType type = NetworkType::other;
    bool defined = false, zero = false, boundary = false;
    bool row_min = false, col_min = false;                 // G_x at y, G^_y at x
    std::vector<bool> isolated_mp, isolated_pm;            // per radius
};

// Gap dictionary on the sheet grid: for G > 0 the strict plateau minima
// of the row slice G_x and the column slice G^_y decide I/IIa/IIb/III; for
// G = 0 quadrant isolation of the zero set (at the smallest radius) decides
// IV/Va/Vb.
inline GapDetail classify_gap_detail(const GapSheet& s, const ZeroSet& z, int i, int j,
                                     const std::vector<int>& radii) {
    GapDetail d;
    const int nx = int(s.xs.size()), ny = int(s.ys.size());
    if (i < 0 || j < 0 || i >= nx || j >= ny) throw parameter_error("point is not on the sheet grid");
    d.defined = s.defined(i, j);
    if (!d.defined) return d;
    d.zero = z.contains(i, j);
    d.boundary = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
    if (d.boundary) return d;
    if (!d.zero) {
        d.row_min = strict_min_at(s.row(i), j);
        d.col_min = strict_min_at(s.col(j), i);
        if (d.row_min && d.col_min) d.type = NetworkType::III;
        else if (d.row_min) d.type = NetworkType::IIa;
        else if (d.col_min) d.type = NetworkType::IIb;
        else d.type = NetworkType::I;
        return d;
    }
    d.isolated_mp = quadrant_isolated(z, i, j, Quadrant::minus_plus, radii);
    d.isolated_pm = quadrant_isolated(z, i, j, Quadrant::plus_minus, radii);
    const bool mp = d.isolated_mp[0], pm = d.isolated_pm[0];
    if (!mp && !pm) d.type = NetworkType::IV;
    else if (mp && !pm) d.type = NetworkType::Va;
    else if (!mp && pm) d.type = NetworkType::Vb;
    else d.type = NetworkType::other;
    return d;
}

inline NetworkType classify_gap(const GapSheet& s, int i, int j, const std::vector<int>& radii) {
    return classify_gap_detail(s, zero_set(s), i, j, radii).type;
}

// ---------------------------------------------------------------- agreement

struct AgreementMatrix {
    std::array<std::array<long, network_type_count>, network_type_count> counts{};  // [geometric][gap]
    long samples = 0;
    long zero_split_agree = 0;  // geometric in {IV,Va,Vb} iff G = 0
    long three_stars = 0;

    void add(NetworkType geo, NetworkType gap, bool zero_agree) {
        ++counts[int(geo)][int(gap)];
        ++samples;
        zero_split_agree += zero_agree;
    }
    void merge(const AgreementMatrix& o) {
        for (int a = 0; a < network_type_count; ++a)
            for (int b = 0; b < network_type_count; ++b) counts[a][b] += o.counts[a][b];
        samples += o.samples;
        zero_split_agree += o.zero_split_agree;
        three_stars += o.three_stars;
    }
    long row_sum(int a) const {
        long s = 0;
        for (long c : counts[a]) s += c;
        return s;
    }
    long col_sum(int b) const {
        long s = 0;
        for (int a = 0; a < network_type_count; ++a) s += counts[a][b];
        return s;
    }
    // Agreement among points whose geometric type is one of I, IIa, IIb, III.
    std::pair<long, long> minimum_agreement() const {
        long agree = 0, total = 0;
        for (int a = 0; a <= int(NetworkType::III); ++a) {
            total += row_sum(a);
            agree += counts[a][a];
        }
        return {agree, total};
    }
};

struct SheetPoint {
    int i = 0, j = 0;
};

// Classifies each sampled sheet point both ways.
inline AgreementMatrix agreement_matrix(const Model& m, const GapSheet& s, const std::vector<SheetPoint>& pts,
                                        const std::vector<int>& radii, int threads = 1) {
    const auto z = zero_set(s);
    std::vector<NetworkType> geo(pts.size()), gap(pts.size());
    std::vector<char> star(pts.size(), 0);
    parallel_for(pts.size(), threads, [&](std::size_t k) {
        const auto [i, j] = pts[k];
        const OrderedQuad q{{s.xs[i], s.t0}, {s.ys[j], s.t1}};
        const auto d = classify_geometric_detail(network(m, q));
        geo[k] = d.type;
        star[k] = d.three_star;
        gap[k] = classify_gap_detail(s, z, i, j, radii).type;
    });
    AgreementMatrix a;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const bool zero = s.defined(pts[k].i, pts[k].j) && z.contains(pts[k].i, pts[k].j);
        a.add(geo[k], gap[k], is_zero_type(geo[k]) == zero);
        a.three_stars += star[k];
    }
    return a;
}

// ---------------------------------------------------------------- one-sided minima

// [disjoint2(x^2 -> (y, y+e)) - disjoint2(x^2 -> y^2)] - [L(x; y+e) - L(x; y)].
inline std::optional<Value> right_min_identity_residual(const Model& m, const SpaceTimePoint& x, double y,
                                                        double eps, double t) {
    if (eps < 0) throw parameter_error("epsilon must be >= 0");
    const SpaceTimePoint py{y, t}, pe{y + eps, t};
    const auto a = disjoint2_value(m, doubled(x), EndpointPair{py, pe});
    const auto b = disjoint2_value(m, doubled(x), doubled(py));
    if (!a || !b) return std::nullopt;
    return (*a - *b) - (passage_value(m, {x, pe}) - passage_value(m, {x, py}));
}

struct IdentityCheck {
    bool holds = false;
    Value residual = 0;
};

inline std::optional<IdentityCheck> right_min_identity(const Model& m, const SpaceTimePoint& x, double y,
                                                       double eps, double t) {
    const auto r = right_min_identity_residual(m, x, y, eps, t);
    if (!r) return std::nullopt;
    return IdentityCheck{value_eq(*r, 0.0), *r};
}

struct OneSidedReport {
    bool terminal_coincidence = false;
    double interval_length = 0;
    Chain tau_right, geodesic_right;
};

// Whether the right member of the rightmost 2-optimizer runs along the
// rightmost geodesic on a terminal time interval of positive length.
inline std::optional<OneSidedReport> one_sided_diag(const Model& m, const OrderedQuad& q) {
    const auto tau = optimizer2(m, q, Side::right);
    if (!tau) return std::nullopt;
    OneSidedReport r;
    r.tau_right = tau->right;
    r.geodesic_right = geodesic(m, q, Side::right);
    const auto ov = overlap(r.tau_right, r.geodesic_right);
    if (!ov.empty() && ov.back().hi == q.end.t && ov.back().lo < ov.back().hi) {
        r.terminal_coincidence = true;
        r.interval_length = ov.back().hi - ov.back().lo;
    }
    return r;
}

}  // namespace lppgap
