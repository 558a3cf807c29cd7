#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "lppgap/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lppgap: passage times, two-path gaps and geodesic networks"};
    app.require_subcommand(1);
    std::string config_path, out;
    std::int64_t seed = -1;
    int threads = 0;
    for (const auto& name : lppgap::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "base seed (overrides the config)")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", out, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) j = nlohmann::json::parse(lppgap::read_file(config_path));
        if (!j.is_object()) throw lppgap::config_error("<root>: expected an object");
        if (j.contains("command") && j["command"] != command)
            throw lppgap::config_error("command: config is for '" + j["command"].get<std::string>() + "'");
        j["command"] = command;
        if (seed >= 0) j["seed"] = seed;
        if (!out.empty()) j["out"] = out;
        if (threads > 0) j["threads"] = threads;
        const auto cfg = lppgap::parse_config(j);
        const auto res = lppgap::run_experiment(cfg);
        std::printf("%s: %zu artifacts in %s (%.2f s)\n", command.c_str(), res.manifest.artifacts.size(),
                    res.dir.string().c_str(), res.manifest.wall_clock_seconds);
        if (!res.pass) {
            std::fprintf(stderr, "verification failed; see counterexample.json\n");
            return 1;
        }
    } catch (const lppgap::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
