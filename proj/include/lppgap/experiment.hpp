#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "lppgap/busemann.hpp"
#include "lppgap/classify.hpp"
#include "lppgap/config.hpp"
#include "lppgap/dimension.hpp"
#include "lppgap/gap.hpp"
#include "lppgap/manifest.hpp"
#include "lppgap/oracle.hpp"
#include "lppgap/parallel.hpp"
#include "lppgap/rng.hpp"
#include "lppgap/svg.hpp"

// Configuration-driven runs.  Each replicate r uses seed + r, computes its
// artifacts in memory, and the artifacts are written in replicate order
// under rep<r>/ so the tree does not depend on the thread count.
namespace lppgap {

inline constexpr std::uint32_t stream_sampling = 0x5a3b1;

// ---------------------------------------------------------------- CSV

inline std::string csv_num(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct Csv {
    std::string text;

    explicit Csv(const std::string& header) : text(header + "\n") {}
    template <class... T>
    void row(const T&... cells) {
        std::string line;
        ((line += cell(cells) + ","), ...);
        line.back() = '\n';
        text += line;
    }

private:
    static std::string cell(double v) { return csv_num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
};

// ---------------------------------------------------------------- setups

inline Law law_of(const ExperimentConfig& c) {
    const auto name = c.string("law");
    const double p = c.number("p");
    if (name == "geometric") return Law::geometric(p);
    if (name == "exponential") return Law::exponential();
    if (name == "bernoulli") return Law::bernoulli(p);
    throw config_error("law: unknown law '" + name + "'");
}

struct SheetSetup {
    Model model;
    std::vector<double> xs, ys;
    double t0 = 0, t1 = 0;
    ScalingFrame frame{1.0};
    double spacing = 2;
};

// Sources xs centred at 0 at time t0, targets at t1 = t0 + n.  On the lattice
// t0 is the smallest time at which every source is a cell, and the field is
// just large enough to hold every target.
inline SheetSetup lattice_sheet_setup(std::uint64_t seed, int n, int count, int spacing, Law law) {
    if (n < 1 || count < 1) throw parameter_error("sheet needs n >= 1 and count >= 1");
    if (spacing < 2 || spacing % 2) throw parameter_error("lattice sheet spacing must be even and >= 2");
    SheetSetup s;
    s.spacing = spacing;
    s.frame = ScalingFrame(n);
    s.xs = centered_grid(0, spacing, count);
    int X = 0;
    for (double x : s.xs) X = std::max(X, int(std::fabs(x)));
    const int par = ((int(s.xs[0]) % 2) + 2) % 2;
    const int t0 = X % 2 == par ? X : X + 1;
    s.t0 = t0;
    s.t1 = t0 + n;
    for (double x : s.xs) s.ys.push_back(x + (n % 2));
    int Y = 0;
    for (double y : s.ys) Y = std::max(Y, int(std::fabs(y)));
    const int M = (int(s.t1) + Y) / 2 + 1;
    s.model = make_lattice_field(seed, M, M, law);
    return s;
}

inline SheetSetup poisson_sheet_setup(std::uint64_t seed, double n, int count, double spacing, double rate) {
    if (!(n > 0) || count < 1 || !(spacing > 0)) throw parameter_error("sheet needs n > 0, count >= 1, spacing > 0");
    SheetSetup s;
    s.spacing = spacing;
    s.frame = ScalingFrame(n);
    s.xs = centered_grid(0, spacing, count);
    s.ys = s.xs;
    s.t0 = 0;
    s.t1 = n;
    const double lo = s.xs.front() - n / 2, hi = s.xs.back() + n / 2;
    s.model = make_poisson_cloud(seed, rate, Region{lo, hi, 0.0, n});
    return s;
}

inline SheetSetup sheet_setup(const ExperimentConfig& c, std::uint64_t seed) {
    const auto kind = c.string("model");
    const int n = int(c.integer("n")), count = int(c.integer("count"));
    if (kind == "lattice") {
        const double sp = c.number("spacing");
        if (sp != std::floor(sp)) throw config_error("spacing: lattice spacing must be an integer");
        return lattice_sheet_setup(seed, n, count, int(sp), law_of(c));
    }
    if (kind == "poisson") return poisson_sheet_setup(seed, n, count, c.number("spacing"), c.number("rate"));
    throw config_error("model: unknown model '" + kind + "'");
}

// Field and origin for Busemann runs: targets up to time t0 + 2h and sources
// up to 2 * half_width cells either side of the origin.
struct BusemannSetup {
    LatticeField field;
    SpaceTimePoint origin;
    std::vector<double> xs;
};

inline BusemannSetup busemann_setup(std::uint64_t seed, int h, int half_width, Law law) {
    if (h < 2 || half_width < 0) throw parameter_error("Busemann setup needs h >= 2 and half_width >= 0");
    const int M = 2 * h + 4 * half_width + 300;
    BusemannSetup s;
    s.field = make_lattice_field(seed, M, M, law);
    s.origin = {0.0, double(2 * ((M - 1 - h) / 2))};
    for (int k = -half_width; k <= half_width; ++k) s.xs.push_back(2.0 * k);
    return s;
}

inline std::vector<std::vector<double>> sheet_matrix(const GapSheet& s) {
    std::vector<std::vector<double>> m(s.xs.size(), std::vector<double>(s.ys.size()));
    for (std::size_t i = 0; i < s.xs.size(); ++i)
        for (std::size_t j = 0; j < s.ys.size(); ++j) m[i][j] = s.at(i, j);
    return m;
}

// Rescaled zero set of a sheet, each coordinate measured from the first grid point.
inline std::vector<std::vector<double>> rescaled_zeros(const GapSheet& s, const ZeroSet& z) {
    std::vector<std::vector<double>> pts;
    const double u = s.frame.spatial_unit();
    for (auto [i, j] : z.cells) pts.push_back({(s.xs[i] - s.xs[0]) / u, (s.ys[j] - s.ys[0]) / u});
    return pts;
}

inline double sheet_extent(const GapSheet& s, double spacing) {
    return (s.xs.back() - s.xs.front() + spacing) / s.frame.spatial_unit();
}

inline double zero_tolerance(const Model& m) {
    if (const auto* f = std::get_if<LatticeField>(&m)) return f->integer_valued() ? 0.0 : 1e-9;
    return 0.0;
}

// ---------------------------------------------------------------- replicate outputs

struct OutputFile {
    std::string path, data, schema;
};

struct ReplicateOutput {
    std::vector<OutputFile> files;
    nlohmann::json metrics = nlohmann::json::object();
    nlohmann::json environment;
    bool pass = true;  // verify only
};

inline std::string sheet_csv(const GapSheet& s) {
    Csv c("x,y,L,L2,G");
    for (std::size_t i = 0; i < s.xs.size(); ++i)
        for (std::size_t j = 0; j < s.ys.size(); ++j)
            c.row(s.xs[i], s.ys[j], s.L[s.idx(i, j)], s.L2[s.idx(i, j)], s.at(i, j));
    return c.text;
}

// Row-major little-endian float64 values of G (NaN where undefined) and the
// JSON header describing them.
inline std::string sheet_binary(const GapSheet& s) {
    std::string out;
    out.reserve(s.G.size() * 8);
    for (double g : s.G) {
        std::uint64_t bits;
        std::memcpy(&bits, &g, 8);
        for (int b = 0; b < 8; ++b) out.push_back(char((bits >> (8 * b)) & 0xff));
    }
    return out;
}

inline nlohmann::json sheet_binary_header(const GapSheet& s) {
    return {{"rows", s.xs.size()}, {"cols", s.ys.size()}, {"dtype", "float64-le"}, {"order", "row-major"},
            {"xs", s.xs},          {"ys", s.ys},          {"t0", s.t0},           {"t1", s.t1},
            {"n", s.frame.n}};
}

inline std::string zeros_csv(const GapSheet& s, const ZeroSet& z) {
    Csv c("x,y");
    for (auto [i, j] : z.cells) c.row(s.xs[i], s.ys[j]);
    return c.text;
}

inline std::string sheet_svg(const GapSheet& s, const ZeroSet& z) {
    svg::Overlay ov;
    ov.cells = z.cells;
    return svg::heatmap(sheet_matrix(s), {}, ov);
}

inline ReplicateOutput run_sample(const ExperimentConfig& c, std::uint64_t seed) {
    ReplicateOutput out;
    const auto kind = c.string("model");
    if (kind == "lattice") {
        const int rows = int(c.integer("rows")), cols = int(c.integer("cols"));
        if (rows < 1 || cols < 1) throw config_error("rows: lattice needs rows >= 1 and cols >= 1");
        const auto f = make_lattice_field(seed, rows, cols, law_of(c));
        Csv csv("i,j,x,t,weight");
        std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
        double sum = 0;
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                csv.row(i, j, j - i, i + j, f.at(i, j));
                m[i][j] = f.at(i, j);
                sum += f.at(i, j);
            }
        out.files.push_back({"environment.csv", csv.text, "environment_lattice/1"});
        out.files.push_back({"environment.svg", svg::heatmap(m), "svg"});
        out.metrics = {{"cells", rows * cols}, {"mean_weight", sum / (rows * cols)}};
        out.environment = descriptor(Model(f));
        return out;
    }
    if (kind != "poisson") throw config_error("model: unknown model '" + kind + "'");
    const auto r = c.params.at("region").get<std::vector<double>>();
    if (r.size() != 4) throw config_error("region: expected [x_min, x_max, t_min, t_max]");
    const auto cloud = make_poisson_cloud(seed, c.number("rate"), Region{r[0], r[1], r[2], r[3]});
    Csv csv("x,t");
    for (const auto& p : cloud.points) csv.row(p.x, p.t);
    out.files.push_back({"points.csv", csv.text, "environment_cloud/1"});
    out.files.push_back({"points.svg", svg::points(cloud.points, r[0], r[1], r[2], r[3]), "svg"});
    out.metrics = {{"points", cloud.points.size()}};
    out.environment = descriptor(Model(cloud));
    return out;
}

inline ReplicateOutput run_gap(const ExperimentConfig& c, std::uint64_t seed, int threads) {
    ReplicateOutput out;
    const auto st = sheet_setup(c, seed);
    const auto s = gap_sheet(st.model, st.xs, st.ys, st.t0, st.t1, st.frame, threads);
    const auto z = zero_set(s, zero_tolerance(st.model));
    std::size_t defined = 0;
    double sum = 0;
    for (double g : s.G)
        if (is_defined(g)) {
            ++defined;
            sum += g;
        }
    out.files.push_back({"sheet.csv", sheet_csv(s), "gap_sheet/1"});
    out.files.push_back({"zeros.csv", zeros_csv(s, z), "zero_set/1"});
    out.files.push_back({"sheet.bin", sheet_binary(s), "gap_sheet_binary/1"});
    out.files.push_back({"sheet.bin.json", sheet_binary_header(s).dump(2) + "\n", "gap_sheet_binary_header/1"});
    out.files.push_back({"sheet.svg", sheet_svg(s, z), "svg"});
    out.metrics = {{"points", s.G.size()},
                   {"defined", defined},
                   {"zeros", z.size()},
                   {"mean_gap", defined ? sum / double(defined) : 0.0},
                   {"t0", s.t0},
                   {"t1", s.t1}};
    out.environment = descriptor(st.model);
    return out;
}

// Interior sheet points drawn uniformly with replacement.
inline std::vector<SheetPoint> sample_points(std::uint64_t seed, const GapSheet& s, int samples) {
    const int nx = int(s.xs.size()), ny = int(s.ys.size());
    if (nx < 3 || ny < 3) throw parameter_error("classification needs a sheet of at least 3 x 3");
    std::vector<SheetPoint> pts;
    for (int k = 0; k < samples; ++k) {
        const int i = 1 + std::min(nx - 3, int(rng::uniform(seed, stream_sampling, std::uint64_t(k), 0) * (nx - 2)));
        const int j = 1 + std::min(ny - 3, int(rng::uniform(seed, stream_sampling, std::uint64_t(k), 1) * (ny - 2)));
        pts.push_back({i, j});
    }
    return pts;
}

struct Classification {
    std::vector<SheetPoint> points;
    std::vector<NetworkType> geometric, gap;
    std::vector<char> three_star;
    AgreementMatrix matrix;
};

inline Classification classify_points(const Model& m, const GapSheet& s, const std::vector<SheetPoint>& pts,
                                      const std::vector<int>& radii, int threads) {
    Classification c;
    c.points = pts;
    const auto z = zero_set(s, zero_tolerance(m));
    c.geometric.resize(pts.size());
    c.gap.resize(pts.size());
    c.three_star.assign(pts.size(), 0);
    parallel_for(pts.size(), threads, [&](std::size_t k) {
        const auto [i, j] = pts[k];
        const OrderedQuad q{{s.xs[i], s.t0}, {s.ys[j], s.t1}};
        const auto d = classify_geometric_detail(network(m, q));
        c.geometric[k] = d.type;
        c.three_star[k] = d.three_star;
        c.gap[k] = classify_gap_detail(s, z, i, j, radii).type;
    });
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const bool zero = z.contains(pts[k].i, pts[k].j);
        c.matrix.add(c.geometric[k], c.gap[k], is_zero_type(c.geometric[k]) == zero);
        c.matrix.three_stars += c.three_star[k];
    }
    return c;
}

inline std::string agreement_csv(const AgreementMatrix& a) {
    Csv c("geometric,gap,count");
    for (int g = 0; g < network_type_count; ++g)
        for (int h = 0; h < network_type_count; ++h)
            c.row(type_name(NetworkType(g)), type_name(NetworkType(h)), a.counts[g][h]);
    return c.text;
}

inline ReplicateOutput run_classify(const ExperimentConfig& c, std::uint64_t seed, int threads) {
    ReplicateOutput out;
    const auto st = sheet_setup(c, seed);
    const auto s = gap_sheet(st.model, st.xs, st.ys, st.t0, st.t1, st.frame, threads);
    const auto radii = c.params.at("radii").get<std::vector<int>>();
    if (radii.empty()) throw config_error("radii: schedule is empty");
    const auto cls = classify_points(st.model, s, sample_points(seed, s, int(c.integer("samples"))), radii, threads);
    Csv pts("x,y,G,geometric,gap,three_star");
    for (std::size_t k = 0; k < cls.points.size(); ++k) {
        const auto [i, j] = cls.points[k];
        pts.row(s.xs[i], s.ys[j], s.at(i, j), type_name(cls.geometric[k]), type_name(cls.gap[k]),
                int(cls.three_star[k]));
    }
    const auto [agree, total] = cls.matrix.minimum_agreement();
    out.files.push_back({"points.csv", pts.text, "classification/1"});
    out.files.push_back({"agreement.csv", agreement_csv(cls.matrix), "agreement/1"});
    out.files.push_back({"sheet.svg", sheet_svg(s, zero_set(s, zero_tolerance(st.model))), "svg"});
    out.metrics = {{"samples", cls.matrix.samples},
                   {"zero_split_agreement", cls.matrix.samples ? double(cls.matrix.zero_split_agree) / double(cls.matrix.samples) : 1.0},
                   {"minimum_agreement", total ? double(agree) / double(total) : 0.0},
                   {"minimum_population", total},
                   {"three_stars", cls.matrix.three_stars}};
    out.environment = descriptor(st.model);
    return out;
}

inline ReplicateOutput run_dim(const ExperimentConfig& c, std::uint64_t seed, int threads) {
    ReplicateOutput out;
    const auto st = sheet_setup(c, seed);
    const auto s = gap_sheet(st.model, st.xs, st.ys, st.t0, st.t1, st.frame, threads);
    const auto z = zero_set(s, zero_tolerance(st.model));
    const int k0 = int(c.integer("k0")), k1 = int(c.integer("k1"));
    if (k1 <= k0) throw config_error("k1: must exceed k0");
    const auto est = box_dimension(rescaled_zeros(s, z), dyadic_scales(sheet_extent(s, st.spacing), k0, k1));
    Csv boxes("scale,boxes");
    for (std::size_t k = 0; k < est.counts.size(); ++k) boxes.row(est.scales[k], est.counts[k]);
    out.files.push_back({"boxes.csv", boxes.text, "box_counts/1"});
    out.files.push_back({"zeros.csv", zeros_csv(s, z), "zero_set/1"});
    out.metrics = {{"zeros", z.size()},
                   {"dimension", est.undefined ? nlohmann::json() : nlohmann::json(est.dimension)},
                   {"r2", est.r2},
                   {"warning", est.warning}};
    if (s.ys.size() >= 64) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < s.xs.size(); ++i) rows.push_back(s.row(i));
        const auto b = brownianity(rows, s.frame, st.spacing, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
        Csv bc("lag,variance,drift");
        for (std::size_t k = 0; k < b.lags.size(); ++k) bc.row(b.lags[k], b.variances[k], b.drifts[k]);
        out.files.push_back({"brownianity.csv", bc.text, "brownianity/1"});
        out.metrics["brownianity_r2"] = b.fit.r2;
        out.metrics["brownianity_slope"] = b.fit.slope;
    }
    out.environment = descriptor(st.model);
    return out;
}

inline std::string profile_csv_header() { return "theta,side,x,value,value2,certified,coalescence_time"; }

inline void append_profile(Csv& csv, const BusemannProfile& p) {
    for (std::size_t k = 0; k < p.xs.size(); ++k)
        csv.row(p.theta, p.side == Side::left ? "left" : "right", p.xs[k], p.values[k], p.values2[k],
                int(p.certified[k]), p.coalescence_time[k]);
}

inline ReplicateOutput run_busemann(const ExperimentConfig& c, std::uint64_t seed, int threads) {
    ReplicateOutput out;
    if (c.string("model") != "lattice") throw config_error("model: Busemann runs need the lattice model");
    const int h = int(c.integer("horizon"));
    const auto st = busemann_setup(seed, h, int(c.integer("half_width")), law_of(c));
    ScanSpec spec;
    spec.origin = st.origin;
    spec.theta_lo = c.number("theta_lo");
    spec.theta_hi = c.number("theta_hi");
    spec.horizon = h;
    spec.mid_time = h / 2;
    spec.coarse_step = int(c.integer("coarse_step"));
    spec.threshold_factor = c.number("threshold_factor");
    const auto dirs = exceptional_scan(st.field, spec);

    Csv scan("theta,below_x,above_x,mid_left,mid_right,separation");
    for (const auto& e : dirs) scan.row(e.theta, e.below.x, e.above.x, e.mid_left, e.mid_right, e.separation);

    const auto thetas = c.params.at("thetas").get<std::vector<double>>();
    const double delta = c.number("delta");
    std::vector<std::pair<double, Side>> jobs;
    for (double th : thetas)
        for (Side sd : {Side::left, Side::right}) jobs.push_back({th, sd});
    std::vector<BusemannProfile> prof(jobs.size()), shifted(delta > 0 ? jobs.size() : 0);
    parallel_for(jobs.size(), threads, [&](std::size_t k) {
        prof[k] = busemann_profile(st.field, st.origin, jobs[k].first, st.xs, jobs[k].second, h);
        if (delta > 0) shifted[k] = busemann_profile(st.field, st.origin, jobs[k].first + delta, st.xs, jobs[k].second, h);
    });
    Csv bcsv(profile_csv_header());
    for (const auto& p : prof) append_profile(bcsv, p);

    std::vector<BusemannGapProfile> gp(dirs.size());
    parallel_for(dirs.size(), threads, [&](std::size_t k) { gp[k] = busemann_gap(st.field, st.origin, dirs[k], st.xs); });
    Csv gcsv("theta,anchors_match,x,value,value2,certified,coalescence_left,coalescence_right,proof_time");
    std::size_t certified = 0, mismatched = 0;
    std::vector<std::vector<double>> heat;
    svg::Overlay ov;
    for (std::size_t d = 0; d < gp.size(); ++d) {
        const auto& p = gp[d];
        std::vector<double> row;
        for (std::size_t k = 0; k < p.xs.size(); ++k) {
            gcsv.row(p.theta, int(p.anchors_match), p.xs[k], p.values[k], p.values2[k], int(p.certified[k]),
                     p.coalescence_left[k], p.coalescence_right[k], p.proof_time[k]);
            certified += p.certified[k];
            mismatched += p.certified[k] && !value_eq(p.values[k], p.values2[k]);
            row.push_back(p.certified[k] ? p.values[k] : undefined_value);
            if (p.certified[k] && p.values[k] == 0) ov.cells.push_back({int(d), int(k)});
        }
        heat.push_back(std::move(row));
    }

    // Split per-side profiles into directions for the horizon tests.
    std::vector<BusemannProfile> right, right_shifted;
    for (std::size_t k = 0; k < jobs.size(); ++k)
        if (jobs[k].second == Side::right) {
            right.push_back(prof[k]);
            if (delta > 0) right_shifted.push_back(shifted[k]);
        }
    const auto rep = stationary_horizon_tests(right, right_shifted);
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& d : rep.directions)
        stats.push_back({{"theta", d.theta},
                         {"drift", d.drift},
                         {"variance_slope", d.variance_fit.slope},
                         {"variance_r2", d.variance_fit.r2},
                         {"certified", d.certified},
                         {"total", d.total},
                         {"horizon_mismatch", d.horizon_mismatch}});
    Csv vlog("theta1,theta2,x1,x2");
    for (const auto& v : rep.violation_log) vlog.row(v[0], v[1], v[2], v[3]);

    out.files.push_back({"scan.csv", scan.text, "exceptional_scan/1"});
    out.files.push_back({"busemann_profiles.csv", bcsv.text, "busemann_profile/1"});
    out.files.push_back({"gap_profiles.csv", gcsv.text, "busemann_gap_profile/1"});
    out.files.push_back({"quadrangle_violations.csv", vlog.text, "quadrangle_violations/1"});
    if (!heat.empty()) out.files.push_back({"gap_profiles.svg", svg::heatmap(heat, {}, ov), "svg"});
    out.metrics = {{"directions", dirs.size()},
                   {"gap_certified", certified},
                   {"gap_certified_mismatch", mismatched},
                   {"quadruples", rep.quadruples},
                   {"quadrangle_violations", rep.violations},
                   {"local_constancy", rep.local_constancy},
                   {"busemann_directions", stats}};
    out.environment = descriptor(Model(st.field));
    return out;
}

inline ReplicateOutput run_verify(const ExperimentConfig& c, std::uint64_t seed, int threads) {
    ReplicateOutput out;
    oracle::BatchSpec b;
    b.lattice = int(c.integer("lattice"));
    b.cloud = int(c.integer("cloud"));
    b.max_side = int(c.integer("max_side"));
    b.max_points = int(c.integer("max_points"));
    b.seed = seed;
    b.threads = threads;
    const auto rep = oracle::verify_engine(b);
    nlohmann::json r = {{"pass", rep.pass},
                        {"instances", rep.instances},
                        {"checks", rep.checks},
                        {"failures", rep.failures},
                        {"warning", rep.warning},
                        {"weak_equal", rep.weak_equal},
                        {"weak_above", rep.weak_above}};
    out.files.push_back({"verify.json", r.dump(2) + "\n", "verify_report/1"});
    if (!rep.pass) out.files.push_back({"counterexample.json", rep.counterexample.dump(2) + "\n", "counterexample/1"});
    out.metrics = r;
    out.pass = rep.pass;
    out.environment = {{"kind", "oracle_batch"}, {"seed", seed}, {"max_side", b.max_side}, {"max_points", b.max_points}};
    return out;
}

inline ReplicateOutput run_replicate(const ExperimentConfig& c, std::uint64_t seed, int threads) {
    const auto& cmd = c.command;
    if (cmd == "sample") return run_sample(c, seed);
    if (cmd == "gap") return run_gap(c, seed, threads);
    if (cmd == "classify") return run_classify(c, seed, threads);
    if (cmd == "dim") return run_dim(c, seed, threads);
    if (cmd == "busemann") return run_busemann(c, seed, threads);
    if (cmd == "verify") return run_verify(c, seed, threads);
    throw config_error("command: unknown subcommand '" + cmd + "'");
}

struct RunResult {
    Manifest manifest;
    std::filesystem::path dir;
    bool pass = true;
};

// Runs every replicate and writes the artifact tree plus manifest.json under
// the configured output directory.
inline RunResult run_experiment(const ExperimentConfig& c) {
    const auto start = std::chrono::steady_clock::now();
    const int reps = int(c.integer("replicates")), threads = int(c.integer("threads"));
    const std::uint64_t seed = c.seed();
    auto outs = std::vector<ReplicateOutput>(std::size_t(reps));
    auto errors = std::vector<std::string>(std::size_t(reps));
    // Replicates fan out; each one runs its engine calls single-threaded
    // unless there is only one replicate.
    const int inner = reps == 1 ? threads : 1;
    parallel_for(std::size_t(reps), threads, [&](std::size_t r) {
        try {
            outs[r] = run_replicate(c, seed + r, inner);
        } catch (const std::exception& e) {
            errors[r] = "replicate " + std::to_string(r) + " (seed " + std::to_string(seed + r) + "): " + e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    RunResult res;
    res.dir = c.string("out");
    std::filesystem::create_directories(res.dir);
    res.manifest.config = c.to_json();
    res.manifest.metrics = nlohmann::json::array();
    for (int r = 0; r < reps; ++r) {
        const std::string sub = "rep" + std::to_string(r) + "/";
        for (const auto& f : outs[r].files) emit(res.manifest, res.dir, sub + f.path, f.data, f.schema);
        res.manifest.environments.push_back(outs[r].environment);
        res.manifest.metrics.push_back({{"replicate", r}, {"seed", seed + r}, {"values", outs[r].metrics}});
        res.pass = res.pass && outs[r].pass;
    }
    res.manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(res.manifest, res.dir);
    return res;
}

}  // namespace lppgap
