#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lppgap/geometry.hpp"
#include "lppgap/rng.hpp"

namespace lppgap {

struct Region {
    double x_min = 0.0, x_max = 0.0, t_min = 0.0, t_max = 0.0;

    double area() const {
        return std::max(0.0, x_max - x_min) * std::max(0.0, t_max - t_min);
    }
    bool contains(const SpaceTimePoint& p) const {
        return p.x >= x_min && p.x <= x_max && p.t >= t_min && p.t <= t_max;
    }
};

struct PoissonCloud {
    std::uint64_t seed = 0;
    double rate = 2.0;
    Region region;
    std::vector<SpaceTimePoint> points;  // sorted by (t, x)
    bool reflected = false;
    bool explicit_points = false;  // not generated from the seed
};

enum class LawKind { geometric, exponential, bernoulli, explicit_matrix };

struct Law {
    LawKind kind = LawKind::geometric;
    double p = 0.5;

    static Law geometric(double p) { return {LawKind::geometric, p}; }
    static Law exponential() { return {LawKind::exponential, 0.0}; }
    static Law bernoulli(double p) { return {LawKind::bernoulli, p}; }
    static Law explicit_matrix() { return {LawKind::explicit_matrix, 0.0}; }
};

struct Cell {
    int i = 0;
    int j = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

// Cell (i, j) sits at space-time point (x, t) = (j - i, i + j); a down step
// (i+1) moves left, a right step (j+1) moves right.
inline SpaceTimePoint cell_point(Cell c) { return {double(c.j - c.i), double(c.i + c.j)}; }
inline SpaceTimePoint cell_point(int i, int j) { return cell_point(Cell{i, j}); }

struct LatticeField {
    std::uint64_t seed = 0;
    int rows = 0;
    int cols = 0;
    Law law;
    std::vector<double> weights;  // row-major
    bool reflected = false;

    double at(int i, int j) const { return weights[std::size_t(i) * cols + j]; }
    double at(Cell c) const { return at(c.i, c.j); }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < rows && j < cols; }
    bool integer_valued() const {
        if (law.kind == LawKind::exponential) return false;
        for (double w : weights)
            if (w != std::floor(w) || std::fabs(w) > 1e6) return false;
        return true;
    }

    // Cell at a space-time point, if the point is a cell of this field.
    std::optional<Cell> cell_at(const SpaceTimePoint& p) const {
        if (p.x != std::floor(p.x) || p.t != std::floor(p.t)) return std::nullopt;
        const long long x = (long long)p.x, t = (long long)p.t;
        if (((t - x) % 2 + 2) % 2 != 0) return std::nullopt;
        const long long i = (t - x) / 2, j = (t + x) / 2;
        if (i < 0 || j < 0 || i >= rows || j >= cols) return std::nullopt;
        return Cell{int(i), int(j)};
    }
    Cell require_cell(const SpaceTimePoint& p) const {
        auto c = cell_at(p);
        if (!c) throw domain_error("point is not a cell of the lattice field");
        return *c;
    }
};

using Model = std::variant<PoissonCloud, LatticeField>;

inline PoissonCloud make_poisson_cloud(std::uint64_t seed, double rate, Region region) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw parameter_error("rate must be > 0");
    if (region.x_max < region.x_min || region.t_max < region.t_min)
        throw parameter_error("region bounds are inverted");
    PoissonCloud cloud;
    cloud.seed = seed;
    cloud.rate = rate;
    cloud.region = region;
    const double area = region.area();
    if (area <= 0.0) return cloud;
    const std::int64_t count = rng::poisson(seed, rng::poisson_count, rate * area);
    cloud.points.reserve(std::size_t(count));
    const double wx = region.x_max - region.x_min, wt = region.t_max - region.t_min;
    for (std::int64_t k = 0; k < count; ++k) {
        const auto b = rng::block64(seed, rng::poisson_coord, std::uint64_t(k));
        cloud.points.push_back({region.x_min + wx * rng::to_open01(b[0]),
                                region.t_min + wt * rng::to_open01(b[1])});
    }
    std::sort(cloud.points.begin(), cloud.points.end(), time_order);
    return cloud;
}

// Cloud with explicit points (tests and replayed counterexamples).
inline PoissonCloud make_explicit_cloud(std::vector<SpaceTimePoint> pts) {
    PoissonCloud cloud;
    cloud.rate = 2.0;
    cloud.explicit_points = true;
    if (!pts.empty()) {
        cloud.region = {pts[0].x, pts[0].x, pts[0].t, pts[0].t};
        for (const auto& p : pts) {
            cloud.region.x_min = std::min(cloud.region.x_min, p.x);
            cloud.region.x_max = std::max(cloud.region.x_max, p.x);
            cloud.region.t_min = std::min(cloud.region.t_min, p.t);
            cloud.region.t_max = std::max(cloud.region.t_max, p.t);
        }
    }
    std::sort(pts.begin(), pts.end(), time_order);
    cloud.points = std::move(pts);
    return cloud;
}

inline double draw_weight(const Law& law, std::uint64_t seed, std::uint64_t index) {
    const double u = rng::uniform(seed, rng::lattice_weight, index);
    switch (law.kind) {
        case LawKind::geometric: return double(rng::geometric_from_uniform(u, law.p));
        case LawKind::exponential: return rng::exponential_from_uniform(u);
        case LawKind::bernoulli: return u < law.p ? 1.0 : 0.0;
        case LawKind::explicit_matrix: break;
    }
    throw parameter_error("explicit law has no sampler");
}

inline LatticeField make_lattice_field(std::uint64_t seed, int rows, int cols, Law law) {
    if (rows < 1 || cols < 1) throw parameter_error("lattice needs rows, cols >= 1");
    if ((law.kind == LawKind::geometric || law.kind == LawKind::bernoulli) &&
        !(law.p > 0.0 && law.p < 1.0))
        throw parameter_error("law parameter p must lie in (0,1)");
    if (law.kind == LawKind::explicit_matrix)
        throw parameter_error("use make_explicit_field for explicit matrices");
    LatticeField f;
    f.seed = seed;
    f.rows = rows;
    f.cols = cols;
    f.law = law;
    f.weights.resize(std::size_t(rows) * cols);
    for (std::size_t k = 0; k < f.weights.size(); ++k) f.weights[k] = draw_weight(law, seed, k);
    return f;
}

inline LatticeField make_explicit_field(const std::vector<std::vector<double>>& matrix) {
    if (matrix.empty() || matrix[0].empty()) throw parameter_error("explicit matrix is empty");
    LatticeField f;
    f.rows = int(matrix.size());
    f.cols = int(matrix[0].size());
    f.law = Law::explicit_matrix();
    for (const auto& row : matrix) {
        if (int(row.size()) != f.cols) throw parameter_error("explicit matrix is ragged");
        for (double w : row) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw parameter_error("lattice weights must be finite and nonnegative");
            f.weights.push_back(w);
        }
    }
    return f;
}

// Flip symmetry (x, t) -> (-x, -t).  For the lattice this is the 180 degree
// rotation of the array, and reflect_point maps cells accordingly.
inline PoissonCloud reflect(const PoissonCloud& c) {
    PoissonCloud r = c;
    r.reflected = !c.reflected;
    r.region = {-c.region.x_max, -c.region.x_min, -c.region.t_max, -c.region.t_min};
    for (auto& p : r.points) p = {-p.x, -p.t};
    std::sort(r.points.begin(), r.points.end(), time_order);
    return r;
}

inline LatticeField reflect(const LatticeField& f) {
    LatticeField r = f;
    r.reflected = !f.reflected;
    for (int i = 0; i < f.rows; ++i)
        for (int j = 0; j < f.cols; ++j)
            r.weights[std::size_t(f.rows - 1 - i) * f.cols + (f.cols - 1 - j)] = f.at(i, j);
    return r;
}

inline Model reflect(const Model& m) {
    return std::visit([](const auto& v) -> Model { return reflect(v); }, m);
}

inline SpaceTimePoint reflect_point(const PoissonCloud&, const SpaceTimePoint& p) {
    return {-p.x, -p.t};
}

inline SpaceTimePoint reflect_point(const LatticeField& f, const SpaceTimePoint& p) {
    const Cell c = f.require_cell(p);
    return cell_point(f.rows - 1 - c.i, f.cols - 1 - c.j);
}

inline std::string law_name(LawKind k) {
    switch (k) {
        case LawKind::geometric: return "geometric";
        case LawKind::exponential: return "exponential";
        case LawKind::bernoulli: return "bernoulli";
        case LawKind::explicit_matrix: return "explicit";
    }
    return "unknown";
}

inline LawKind law_from_name(const std::string& s) {
    if (s == "geometric") return LawKind::geometric;
    if (s == "exponential") return LawKind::exponential;
    if (s == "bernoulli") return LawKind::bernoulli;
    if (s == "explicit") return LawKind::explicit_matrix;
    throw parameter_error("unknown law '" + s + "'");
}

// Environment descriptors: enough to regenerate the model exactly.  Explicit
// environments carry their data.
inline nlohmann::json descriptor(const PoissonCloud& c) {
    nlohmann::json j;
    j["model"] = "poisson";
    j["seed"] = c.seed;
    j["rate"] = c.rate;
    j["region"] = {c.region.x_min, c.region.x_max, c.region.t_min, c.region.t_max};
    j["reflected"] = c.reflected;
    j["count"] = c.points.size();
    if (c.explicit_points) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : c.points) pts.push_back({p.x, p.t});
        j["points"] = pts;
    }
    return j;
}

inline nlohmann::json descriptor(const LatticeField& f) {
    nlohmann::json j;
    j["model"] = "lattice";
    j["seed"] = f.seed;
    j["rows"] = f.rows;
    j["cols"] = f.cols;
    j["law"] = law_name(f.law.kind);
    j["p"] = f.law.p;
    j["reflected"] = f.reflected;
    if (f.law.kind == LawKind::explicit_matrix) {
        nlohmann::json m = nlohmann::json::array();
        for (int i = 0; i < f.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < f.cols; ++k) row.push_back(f.at(i, k));
            m.push_back(row);
        }
        j["matrix"] = m;
    }
    return j;
}

inline nlohmann::json descriptor(const Model& m) {
    return std::visit([](const auto& v) { return descriptor(v); }, m);
}

inline Model model_from_descriptor(const nlohmann::json& j) {
    const std::string kind = j.at("model").get<std::string>();
    if (kind == "poisson") {
        PoissonCloud c;
        if (j.contains("points")) {
            std::vector<SpaceTimePoint> pts;
            for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            c = make_explicit_cloud(pts);
            c.rate = j.at("rate").get<double>();
            const auto& r = j.at("region");
            c.region = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                        r.at(3).get<double>()};
            c.reflected = j.value("reflected", false);
            return c;
        }
        const auto& r = j.at("region");
        Region reg{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                   r.at(3).get<double>()};
        const bool refl = j.value("reflected", false);
        // A reflected cloud is regenerated from the unreflected region.
        if (refl) reg = {-reg.x_max, -reg.x_min, -reg.t_max, -reg.t_min};
        c = make_poisson_cloud(j.at("seed").get<std::uint64_t>(), j.at("rate").get<double>(), reg);
        return refl ? reflect(c) : c;
    }
    if (kind == "lattice") {
        const LawKind lk = law_from_name(j.at("law").get<std::string>());
        const bool refl = j.value("reflected", false);
        LatticeField f;
        if (lk == LawKind::explicit_matrix) {
            // The stored matrix is the realized one, already reflected if flagged.
            f = make_explicit_field(j.at("matrix").get<std::vector<std::vector<double>>>());
            f.reflected = refl;
            return f;
        }
        f = make_lattice_field(j.at("seed").get<std::uint64_t>(), j.at("rows").get<int>(),
                               j.at("cols").get<int>(), Law{lk, j.at("p").get<double>()});
        return refl ? reflect(f) : f;
    }
    throw parameter_error("unknown model kind '" + kind + "'");
}

}  // namespace lppgap
