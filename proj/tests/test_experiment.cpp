#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "lppgap/experiment.hpp"
#include "lppgap/svg.hpp"

using namespace lppgap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("lppgap_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig config(nlohmann::json j, const fs::path& out) {
    j["out"] = out.string();
    return parse_config(j);
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const config_error& e) {
        return e.what();
    }
    return "";
}

int count(const std::string& s, const std::string& needle) {
    int n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST(Config, MinimalFillsDefaults) {
    const auto c = parse_config(R"({"command": "gap", "n": 16})");
    EXPECT_EQ(c.command, "gap");
    EXPECT_EQ(c.integer("n"), 16);
    EXPECT_EQ(c.integer("seed"), 1);
    EXPECT_EQ(c.integer("replicates"), 1);
    EXPECT_EQ(c.string("law"), "geometric");
}

TEST(Config, Errors) {
    EXPECT_EQ(error_of(R"({"command": "gap", "n": 16, "nn": 2})"), "nn: unknown key for 'gap'");
    EXPECT_EQ(error_of(R"({"command": "gap"})"), "n: missing required key");
    EXPECT_EQ(error_of(R"({"command": "gap", "n": "big"})"), "n: expected integer");
    EXPECT_EQ(error_of(R"({"command": "gap", "n": 16, "replicates": 0})"), "replicates: must be >= 1");
    EXPECT_EQ(error_of(R"({"n": 16})"), "command: missing required key");
    EXPECT_NE(error_of("{not json"), "");
    EXPECT_THROW(parse_config(R"({"command": "fly"})"), config_error);
}

TEST(Config, RoundTrip) {
    for (const auto& cmd : commands()) {
        nlohmann::json j{{"command", cmd}};
        for (const auto& [k, spec] : key_set(cmd))
            if (spec.fallback.is_null() && k != "command") j[k] = 16;
        const auto c = parse_config(j);
        EXPECT_EQ(parse_config(serialize_config(c)), c) << cmd;
    }
}

TEST(Gap, EightByEightSheet) {
    const auto out = scratch("gap8");
    run_experiment(config({{"command", "gap"}, {"n", 16}, {"count", 8}}, out));
    const auto csv = read_file(out / "rep0/sheet.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,L,L2,G");
    EXPECT_EQ(count(csv, "\n"), 65);
    const auto bin = read_file(out / "rep0/sheet.bin");
    EXPECT_EQ(bin.size(), 64u * 8);  // G only, float64
    const auto head = nlohmann::json::parse(read_file(out / "rep0/sheet.bin.json"));
    EXPECT_EQ(head.at("rows"), 8);
    EXPECT_EQ(head.at("dtype"), "float64-le");
    EXPECT_TRUE(tampered_artifacts(out).empty());
}

TEST(Gap, ThreadCountDoesNotChangeArtifacts) {
    std::vector<std::string> sheets, points;
    for (int threads : {1, 4, 8}) {
        const auto out = scratch("threads" + std::to_string(threads));
        run_experiment(config({{"command", "gap"}, {"n", 32}, {"count", 12}, {"threads", threads}}, out));
        sheets.push_back(read_file(out / "rep0/sheet.csv"));
        const auto out2 = scratch("cthreads" + std::to_string(threads));
        run_experiment(config({{"command", "classify"},
                               {"n", 32},
                               {"count", 12},
                               {"samples", 40},
                               {"replicates", 2},
                               {"threads", threads}},
                              out2));
        points.push_back(read_file(out2 / "rep0/points.csv") + read_file(out2 / "rep1/points.csv"));
    }
    EXPECT_EQ(sheets[0], sheets[1]);
    EXPECT_EQ(sheets[0], sheets[2]);
    EXPECT_EQ(points[0], points[1]);
    EXPECT_EQ(points[0], points[2]);
}

TEST(Gap, ReplicatesUseConsecutiveSeeds) {
    const auto out = scratch("reps");
    const auto res = run_experiment(config({{"command", "gap"}, {"n", 16}, {"count", 6}, {"replicates", 2}}, out));
    const auto single = scratch("reps_single");
    run_experiment(config({{"command", "gap"}, {"n", 16}, {"count", 6}, {"seed", 2}}, single));
    EXPECT_EQ(read_file(out / "rep1/sheet.csv"), read_file(single / "rep0/sheet.csv"));
    EXPECT_EQ(res.manifest.metrics[1].at("seed"), 2);
}

TEST(Svg, OneByOneAndOverlay) {
    const auto a = svg::heatmap({{3.0}});
    EXPECT_EQ(count(a, "<rect"), 1);
    EXPECT_EQ(a, svg::heatmap({{3.0}}));
    EXPECT_THROW(svg::heatmap({}), parameter_error);

    const Model m = make_lattice_field(4, 40, 40, Law::geometric(0.5));
    const auto s = gap_sheet(m, centered_grid(0, 2, 10), centered_grid(0, 2, 10), 9, 25, ScalingFrame(16));
    const auto z = zero_set(s);
    const auto pic = sheet_svg(s, z);
    EXPECT_EQ(count(pic, "<circle"), int(z.size()));
    EXPECT_EQ(count(pic, "<rect"), 100);
}

TEST(Manifest, EmptyRunRoundTrip) {
    const auto dir = scratch("manifest_empty");
    Manifest m;
    m.config = {{"command", "none"}};
    write_manifest(m, dir);
    const auto back = read_manifest(dir);
    EXPECT_TRUE(back.artifacts.empty());
    EXPECT_EQ(back.config, m.config);
    EXPECT_EQ(back.version, tool_version);
    EXPECT_TRUE(tampered_artifacts(dir).empty());
}

TEST(Manifest, DetectsTamperingAndListsEveryArtifact) {
    const auto out = scratch("tamper");
    run_experiment(config({{"command", "gap"}, {"n", 16}, {"count", 6}}, out));
    const auto man = read_manifest(out);
    std::set<std::string> listed;
    for (const auto& a : man.artifacts) listed.insert(a.path);
    for (const auto& e : fs::recursive_directory_iterator(out)) {
        if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
        EXPECT_TRUE(listed.count(fs::relative(e.path(), out).generic_string())) << e.path();
    }
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    write_file(out / "rep0/zeros.csv", "x,y\n0,0\n");
    EXPECT_EQ(tampered_artifacts(out), std::vector<std::string>{"rep0/zeros.csv"});
    fs::remove(out / "rep0/sheet.csv");
    EXPECT_EQ(tampered_artifacts(out).size(), 2u);
}

TEST(Commands, SmallRunsOfEverySubcommand) {
    const auto s = scratch("sample");
    run_experiment(config({{"command", "sample"}, {"rows", 4}, {"cols", 5}}, s));
    const auto env = read_file(s / "rep0/environment.csv");
    EXPECT_EQ(count(env, "\n"), 21);
    const auto p = scratch("sample_poisson");
    run_experiment(config({{"command", "sample"}, {"model", "poisson"}}, p));
    EXPECT_EQ(read_file(p / "rep0/points.csv").substr(0, 4), "x,t\n");

    const auto d = scratch("dim");
    run_experiment(config({{"command", "dim"}, {"n", 32}, {"count", 16}}, d));
    EXPECT_TRUE(fs::exists(d / "rep0/boxes.csv"));

    const auto b = scratch("busemann");
    run_experiment(config({{"command", "busemann"}, {"horizon", 40}, {"half_width", 4}}, b));
    EXPECT_EQ(read_file(b / "rep0/busemann_profiles.csv").substr(0, 49),
              "theta,side,x,value,value2,certified,coalescence_t");

    const auto v = scratch("verify");
    const auto vr = run_experiment(config({{"command", "verify"}, {"lattice", 20}, {"cloud", 20}}, v));
    EXPECT_TRUE(vr.pass);
}

TEST(Cli, ExitCodes) {
    const char* cli = std::getenv("LPPGAP_CLI");
    if (!cli) GTEST_SKIP() << "LPPGAP_CLI not set";
    const auto out = scratch("cli");
    const std::string base = std::string(cli) + " verify --out " + out.string();
    EXPECT_EQ(std::system((base + " > /dev/null").c_str()), 0);
    const auto cfg = out.parent_path() / "lppgap_test_cli_bad.json";
    write_file(cfg, R"({"command": "verify", "bogus": 1})");
    const int rc = std::system((base + " --config " + cfg.string() + " 2> /dev/null").c_str());
    ASSERT_TRUE(WIFEXITED(rc));
    EXPECT_EQ(WEXITSTATUS(rc), 2);
}
