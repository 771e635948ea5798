#pragma once

// Run manifest: fingerprints every input that shaped a build so reruns can
// prove (or disprove) reproducibility. The snapshot and report stay
// byte-identical across replays; the manifest carries wall-clock timestamps
// and is compared digest-by-digest instead.

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "autopkg/config.hpp"
#include "autopkg/error.hpp"
#include "autopkg/graph.hpp"
#include "autopkg/prompts.hpp"
#include "autopkg/sha256.hpp"

namespace autopkg {

inline std::string iso8601_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &t);
#else
    gmtime_r(&t, &tm);
#endif
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open for digest: " + path);
    Sha256 h;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    return h.hex_digest();
}

struct RunManifest {
    ojson config;                              // redacted config snapshot
    std::string corpus_path;
    std::string corpus_digest;                 // sha256 of the corpus file bytes
    std::map<std::string, std::string> prompt_digests; // template name -> sha256
    std::map<std::string, std::string> backends;       // role -> backend id
    std::map<std::string, std::string> outputs;        // artifact -> path
    std::string started_at;
    std::string finished_at;
};

inline std::map<std::string, std::string> prompt_template_digests() {
    std::map<std::string, std::string> out;
    for (const auto& asset : prompts::assets())
        out[asset.filename] = sha256_hex(asset.content);
    return out;
}

inline ojson manifest_to_json(const RunManifest& m) {
    ojson j;
    j["config"] = m.config;
    j["corpus"] = {{"path", m.corpus_path}, {"sha256", m.corpus_digest}};
    j["prompts"] = ojson::object();
    for (const auto& [name, digest] : m.prompt_digests) j["prompts"][name] = digest;
    j["backends"] = ojson::object();
    for (const auto& [role, id] : m.backends) j["backends"][role] = id;
    j["outputs"] = ojson::object();
    for (const auto& [artifact, path] : m.outputs) j["outputs"][artifact] = path;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    return j;
}

inline RunManifest manifest_from_json(const ojson& j) {
    RunManifest m;
    try {
        m.config = j.at("config");
        m.corpus_path = j.at("corpus").at("path").get<std::string>();
        m.corpus_digest = j.at("corpus").at("sha256").get<std::string>();
        for (const auto& [k, v] : j.at("prompts").items())
            m.prompt_digests[k] = v.get<std::string>();
        for (const auto& [k, v] : j.at("backends").items()) m.backends[k] = v.get<std::string>();
        for (const auto& [k, v] : j.at("outputs").items()) m.outputs[k] = v.get<std::string>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
    } catch (const ojson::exception& ex) {
        raise(Errc::ParseError, std::string("manifest: ") + ex.what());
    }
    return m;
}

/// Re-derives every digest the manifest claims; returns human-readable
/// mismatch descriptions (empty = verified).
inline std::vector<std::string> verify_manifest(const RunManifest& m) {
    std::vector<std::string> problems;
    try {
        std::string actual = sha256_file(m.corpus_path);
        if (actual != m.corpus_digest)
            problems.push_back("corpus digest mismatch for " + m.corpus_path);
    } catch (const Error& ex) {
        problems.push_back(std::string("corpus unreadable: ") + ex.what());
    }
    auto current = prompt_template_digests();
    for (const auto& [name, digest] : m.prompt_digests) {
        auto it = current.find(name);
        if (it == current.end())
            problems.push_back("unknown prompt template in manifest: " + name);
        else if (it->second != digest)
            problems.push_back("prompt template drift: " + name);
    }
    return problems;
}

} // namespace autopkg
