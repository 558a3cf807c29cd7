#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lppgap/geometry.hpp"

// Experiment configuration: one flat JSON object per run.  Every subcommand
// has a fixed key set; unknown keys, missing required keys and type
// mismatches are rejected with the offending key path.
namespace lppgap {

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class KeyType { integer, number, string, boolean, int_list, number_list };

struct KeySpec {
    KeyType type;
    nlohmann::json fallback;  // null when required
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"sample", "gap", "classify", "busemann", "dim", "verify"};
    return c;
}

inline std::map<std::string, KeySpec> key_set(const std::string& command) {
    using J = nlohmann::json;
    std::map<std::string, KeySpec> k{
        {"command", {KeyType::string, J()}},
        {"seed", {KeyType::integer, 1}},
        {"replicates", {KeyType::integer, 1}},
        {"threads", {KeyType::integer, 1}},
        {"out", {KeyType::string, "out"}},
    };
    auto model_keys = [&] {
        k["model"] = {KeyType::string, "lattice"};
        k["law"] = {KeyType::string, "geometric"};
        k["p"] = {KeyType::number, 0.5};
        k["rate"] = {KeyType::number, 2.0};
    };
    auto sheet_keys = [&] {
        model_keys();
        k["n"] = {KeyType::integer, J()};
        k["count"] = {KeyType::integer, 32};
        k["spacing"] = {KeyType::number, 2.0};
    };
    if (command == "sample") {
        model_keys();
        k["rows"] = {KeyType::integer, 16};
        k["cols"] = {KeyType::integer, 16};
        k["region"] = {KeyType::number_list, J::array({-4.0, 4.0, 0.0, 8.0})};
    } else if (command == "gap") {
        sheet_keys();
    } else if (command == "classify") {
        sheet_keys();
        k["samples"] = {KeyType::integer, 200};
        k["radii"] = {KeyType::int_list, J::array({1, 2, 4})};
    } else if (command == "busemann") {
        model_keys();
        k["horizon"] = {KeyType::integer, J()};
        k["theta_lo"] = {KeyType::number, -0.4};
        k["theta_hi"] = {KeyType::number, 0.4};
        k["coarse_step"] = {KeyType::integer, 8};
        k["threshold_factor"] = {KeyType::number, 0.5};
        k["half_width"] = {KeyType::integer, 16};
        k["thetas"] = {KeyType::number_list, J::array({-0.2, 0.0, 0.2})};
        k["delta"] = {KeyType::number, 0.0};
    } else if (command == "dim") {
        sheet_keys();
        k["k0"] = {KeyType::integer, 1};
        k["k1"] = {KeyType::integer, 5};
    } else if (command == "verify") {
        k["lattice"] = {KeyType::integer, 200};
        k["cloud"] = {KeyType::integer, 200};
        k["max_side"] = {KeyType::integer, 4};
        k["max_points"] = {KeyType::integer, 10};
    } else {
        throw config_error("command: unknown subcommand '" + command + "'");
    }
    return k;
}

inline bool type_ok(const nlohmann::json& v, KeyType t) {
    switch (t) {
        case KeyType::integer: return v.is_number_integer();
        case KeyType::number: return v.is_number();
        case KeyType::string: return v.is_string();
        case KeyType::boolean: return v.is_boolean();
        case KeyType::int_list:
            if (!v.is_array()) return false;
            for (const auto& e : v)
                if (!e.is_number_integer()) return false;
            return true;
        case KeyType::number_list:
            if (!v.is_array()) return false;
            for (const auto& e : v)
                if (!e.is_number()) return false;
            return true;
    }
    return false;
}

inline const char* type_label(KeyType t) {
    switch (t) {
        case KeyType::integer: return "integer";
        case KeyType::number: return "number";
        case KeyType::string: return "string";
        case KeyType::boolean: return "boolean";
        case KeyType::int_list: return "list of integers";
        case KeyType::number_list: return "list of numbers";
    }
    return "?";
}

struct ExperimentConfig {
    std::string command;
    nlohmann::json params;  // every key of the command, defaults filled in

    std::int64_t integer(const std::string& k) const { return params.at(k).get<std::int64_t>(); }
    double number(const std::string& k) const { return params.at(k).get<double>(); }
    std::string string(const std::string& k) const { return params.at(k).get<std::string>(); }
    std::uint64_t seed() const { return params.at("seed").get<std::uint64_t>(); }
    nlohmann::json to_json() const { return params; }
    bool operator==(const ExperimentConfig& o) const { return command == o.command && params == o.params; }
};

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("<root>: expected an object");
    if (!j.contains("command")) throw config_error("command: missing required key");
    if (!j.at("command").is_string()) throw config_error("command: expected string");
    ExperimentConfig c;
    c.command = j.at("command").get<std::string>();
    const auto keys = key_set(c.command);
    for (const auto& [k, v] : j.items())
        if (!keys.count(k)) throw config_error(k + ": unknown key for '" + c.command + "'");
    c.params = nlohmann::json::object();
    for (const auto& [k, spec] : keys) {
        if (!j.contains(k)) {
            if (spec.fallback.is_null()) throw config_error(k + ": missing required key");
            c.params[k] = spec.fallback;
            continue;
        }
        const auto& v = j.at(k);
        if (!type_ok(v, spec.type)) throw config_error(k + ": expected " + type_label(spec.type));
        c.params[k] = v;
    }
    for (const char* k : {"replicates", "threads"})
        if (c.integer(k) < 1) throw config_error(std::string(k) + ": must be >= 1");
    if (c.params.at("seed").get<std::int64_t>() < 0) throw config_error("seed: must be >= 0");
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("<root>: malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig parse_config(const char* text) { return parse_config(std::string(text)); }

inline std::string serialize_config(const ExperimentConfig& c) { return c.params.dump(2) + "\n"; }

}  // namespace lppgap
