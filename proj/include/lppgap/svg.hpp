#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lppgap/geometry.hpp"

// Deterministic SVG renders: heatmaps for sheets and point overlays.
namespace lppgap::svg {

struct Style {
    double cell = 8.0;  // pixel size of one matrix cell
    std::string zero_color = "#d62728";
    std::string undefined_color = "#dddddd";
    std::string point_color = "#1f77b4";
};

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

// Grey ramp from white (low) to black (high).
inline std::string shade(double v, double lo, double hi) {
    const double u = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
    const int g = int(std::lround(255.0 * (1.0 - u)));
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
    return buf;
}

struct Overlay {
    std::vector<std::pair<int, int>> cells;  // (row, col) marked with a dot
};

inline std::string heatmap(const std::vector<std::vector<double>>& m, const Style& st = {}, const Overlay& ov = {}) {
    if (m.empty() || m[0].empty()) throw parameter_error("heatmap needs a nonempty matrix");
    const std::size_t rows = m.size(), cols = m[0].size();
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : m)
        for (double v : r)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(cols * st.cell) + "\" height=\"" +
                    num(rows * st.cell) + "\">\n";
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double v = m[i][j];
            s += "<rect x=\"" + num(j * st.cell) + "\" y=\"" + num(i * st.cell) + "\" width=\"" + num(st.cell) +
                 "\" height=\"" + num(st.cell) + "\" fill=\"" +
                 (std::isfinite(v) ? shade(v, lo, hi) : st.undefined_color) + "\"/>\n";
        }
    for (const auto& [i, j] : ov.cells)
        s += "<circle cx=\"" + num((j + 0.5) * st.cell) + "\" cy=\"" + num((i + 0.5) * st.cell) + "\" r=\"" +
             num(st.cell / 3) + "\" fill=\"" + st.zero_color + "\"/>\n";
    s += "</svg>\n";
    return s;
}

// Points drawn in a box [x0, x1] x [t0, t1], time increasing upward.
inline std::string points(const std::vector<SpaceTimePoint>& pts, double x0, double x1, double t0, double t1,
                          const Style& st = {}, double size = 400) {
    if (!(x1 > x0) || !(t1 > t0)) throw parameter_error("point plot needs a nondegenerate box");
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(size) + "\" height=\"" + num(size) +
                    "\">\n<rect x=\"0\" y=\"0\" width=\"" + num(size) + "\" height=\"" + num(size) +
                    "\" fill=\"none\" stroke=\"#000000\"/>\n";
    for (const auto& p : pts) {
        const double cx = (p.x - x0) / (x1 - x0) * size, cy = (t1 - p.t) / (t1 - t0) * size;
        s += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"2.000\" fill=\"" + st.point_color + "\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace lppgap::svg
