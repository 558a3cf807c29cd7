#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "json.hpp"
#include "lppgap/geometry.hpp"

namespace lppgap {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr int csv_schema_version = 1;

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int k = 0; k < len; ++k) {
        std::snprintf(buf, sizeof buf, "%02x", md[k]);
        hex += buf;
    }
    return hex;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& data) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << data;
}

struct Artifact {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
    std::string schema;
};

struct Manifest {
    nlohmann::json config;
    nlohmann::json environments = nlohmann::json::array();
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<Artifact> artifacts;
    std::string version = tool_version;
    double wall_clock_seconds = 0;

    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : artifacts)
            a.push_back({{"path", x.path}, {"sha256", x.sha256}, {"bytes", x.bytes}, {"schema", x.schema}});
        return {{"tool", "lppgap"},         {"version", version},     {"config", config},
                {"environments", environments}, {"metrics", metrics}, {"artifacts", a},
                {"csv_schema_version", csv_schema_version}, {"wall_clock_seconds", wall_clock_seconds}};
    }

    static Manifest from_json(const nlohmann::json& j) {
        Manifest m;
        m.version = j.at("version").get<std::string>();
        m.config = j.at("config");
        m.environments = j.at("environments");
        m.metrics = j.at("metrics");
        m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        for (const auto& a : j.at("artifacts"))
            m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(),
                                   a.at("bytes").get<std::size_t>(), a.at("schema").get<std::string>()});
        return m;
    }
};

// Writes an artifact under `dir` and records it.
inline void emit(Manifest& m, const std::filesystem::path& dir, const std::string& rel, const std::string& data,
                 const std::string& schema) {
    write_file(dir / rel, data);
    m.artifacts.push_back({rel, sha256_hex(data), data.size(), schema});
}

inline void write_manifest(const Manifest& m, const std::filesystem::path& dir) {
    write_file(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

inline Manifest read_manifest(const std::filesystem::path& dir) {
    return Manifest::from_json(nlohmann::json::parse(read_file(dir / "manifest.json")));
}

// Artifacts whose current content no longer matches the recorded digest.
inline std::vector<std::string> tampered_artifacts(const std::filesystem::path& dir) {
    std::vector<std::string> bad;
    for (const auto& a : read_manifest(dir).artifacts) {
        const auto p = dir / a.path;
        if (!std::filesystem::exists(p) || sha256_hex(read_file(p)) != a.sha256) bad.push_back(a.path);
    }
    return bad;
}

}  // namespace lppgap
