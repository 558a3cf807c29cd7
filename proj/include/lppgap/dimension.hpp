#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lppgap/geometry.hpp"

namespace lppgap {

struct LinearFit {
    double slope = 0, intercept = 0, r2 = 0;
    bool degenerate = false;
};

// Ordinary least squares y = a + b x.  R^2 is 1 for an exact fit; a flat
// response with no residual also counts as exact.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) {
        f.degenerate = true;
        return f;
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx <= 0) {
        f.degenerate = true;
        f.intercept = my;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = y[k] - f.intercept - f.slope * x[k];
        sse += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - sse / syy : 1.0;
    return f;
}

struct DimensionEstimate {
    double dimension = 0;
    double r2 = 0;
    std::vector<double> scales;
    std::vector<double> counts;
    bool undefined = false;  // empty point set
    std::string warning;
};

// Box counting: slope of log(occupied boxes) against log(1/scale).  Points
// are given as coordinate vectors of a common dimension; boxes are anchored
// at the origin.
inline DimensionEstimate box_dimension(const std::vector<std::vector<double>>& points,
                                       const std::vector<double>& scales) {
    if (scales.size() < 2) throw parameter_error("box counting needs at least two scales");
    for (double s : scales)
        if (!(s > 0)) throw parameter_error("box scales must be positive");
    DimensionEstimate e;
    e.scales = scales;
    if (points.empty()) {
        e.undefined = true;
        e.warning = "empty point set: dimension undefined";
        return e;
    }
    std::vector<double> lx, ly;
    for (double s : scales) {
        std::set<std::vector<long long>> boxes;
        for (const auto& p : points) {
            std::vector<long long> key;
            for (double c : p) key.push_back((long long)std::floor(c / s));
            boxes.insert(std::move(key));
        }
        e.counts.push_back(double(boxes.size()));
        lx.push_back(std::log(1.0 / s));
        ly.push_back(std::log(double(boxes.size())));
    }
    if (std::all_of(e.counts.begin(), e.counts.end(), [](double c) { return c == 1.0; })) {
        e.dimension = 0;
        e.r2 = 0;
        e.warning = "all points fall in one box at every scale";
        return e;
    }
    const auto fit = linear_fit(lx, ly);
    e.dimension = fit.slope;
    e.r2 = fit.r2;
    return e;
}

inline DimensionEstimate box_dimension(const std::vector<double>& points, const std::vector<double>& scales) {
    std::vector<std::vector<double>> p;
    p.reserve(points.size());
    for (double x : points) p.push_back({x});
    return box_dimension(p, scales);
}

// Dyadic scales extent * 2^-k for k in [k0, k1].
inline std::vector<double> dyadic_scales(double extent, int k0, int k1) {
    std::vector<double> s;
    for (int k = k0; k <= k1; ++k) s.push_back(std::ldexp(extent, -k));
    return s;
}

// ---------------------------------------------------------------- Brownianity

struct BrownianityReport {
    std::vector<double> lags;       // rescaled lag lengths
    std::vector<double> variances;  // variance of rescaled increments per lag
    std::vector<double> drifts;     // mean increment per lag
    LinearFit fit;                  // variance against lag
    bool degenerate = false;
};

// Increment variance against lag for one or more slices sampled on a grid of
// the given spacing.  Values are divided by n^{1/3} and lags by n^{2/3}.
// Undefined (NaN) entries are skipped.
inline BrownianityReport brownianity(const std::vector<std::vector<double>>& slices, const ScalingFrame& frame,
                                     double spacing, const std::vector<int>& lags) {
    for (const auto& s : slices)
        if (s.size() < 64) throw parameter_error("Brownianity needs slices of at least 64 points");
    BrownianityReport rep;
    const double vu = frame.fluctuation_unit(), xu = frame.spatial_unit();
    for (int lag : lags) {
        double sum = 0, sum2 = 0;
        std::size_t cnt = 0;
        for (const auto& s : slices)
            for (std::size_t k = 0; k + lag < s.size(); ++k) {
                const double a = s[k], b = s[k + lag];
                if (std::isnan(a) || std::isnan(b)) continue;
                const double d = (b - a) / vu;
                sum += d;
                sum2 += d * d;
                ++cnt;
            }
        const double mean = cnt ? sum / double(cnt) : 0.0;
        const double var = cnt > 1 ? (sum2 - double(cnt) * mean * mean) / double(cnt - 1) : 0.0;
        rep.lags.push_back(lag * spacing / xu);
        rep.variances.push_back(std::max(0.0, var));
        rep.drifts.push_back(mean);
    }
    rep.degenerate = std::all_of(rep.variances.begin(), rep.variances.end(), [](double v) { return v == 0.0; });
    rep.fit = linear_fit(rep.lags, rep.variances);
    return rep;
}

inline BrownianityReport brownianity(const std::vector<double>& slice, const ScalingFrame& frame,
                                     double spacing = 1.0, const std::vector<int>& lags = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) {
    return brownianity(std::vector<std::vector<double>>{slice}, frame, spacing, lags);
}

}  // namespace lppgap
