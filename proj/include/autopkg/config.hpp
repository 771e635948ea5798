#pragma once

// Layered run configuration: defaults < preset < config file < environment
// (credential/endpoint keys only) < command-line flags.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "autopkg/candidate.hpp"
#include "autopkg/chat.hpp"
#include "autopkg/error.hpp"
#include "autopkg/graph.hpp"
#include "autopkg/pipeline.hpp"

namespace autopkg {

/// Flat key=value view of one configuration layer. Sections in the file are
/// flattened to "section.key".
using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = normalize(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                raise(Errc::ParseError, "config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = normalize(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            raise(Errc::ParseError,
                  "config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = normalize(line.substr(0, eq));
        std::string value = line.substr(eq + 1);
        // trim only; values keep internal spacing and case
        size_t b = value.find_first_not_of(" \t");
        size_t e = value.find_last_not_of(" \t\r");
        value = b == std::string::npos ? "" : value.substr(b, e - b + 1);
        if (key.empty())
            raise(Errc::ParseError, "config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        out[key] = value;
    }
    return out;
}

inline ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Only these keys may be supplied through the environment.
inline const std::map<std::string, std::string>& env_key_map() {
    static const std::map<std::string, std::string> m = {
        {"LLM_ENDPOINT", "llm_endpoint"}, {"LLM_MODEL", "llm_model"},
        {"LLM_API_KEY", "llm_api_key"},   {"EMBED_ENDPOINT", "embed_endpoint"},
        {"EMBED_MODEL", "embed_model"},   {"EMBED_API_KEY", "embed_api_key"},
    };
    return m;
}

struct PresetModels {
    std::string kgd;
    std::string type;
    std::string key;
    std::string value;
};

/// Named deployment tiers; they differ only in which backbone serves each
/// role, never in behavior.
inline PresetModels preset_models(const std::string& name) {
    std::string n = normalize(name);
    if (n == "minimal")
        return {"Qwen3-30B-A3B-Instruct-2507", "Qwen3-4B-Instruct-2507",
                "Qwen3-30B-A3B-Instruct-2507", "Qwen3-VL-8B"};
    if (n == "balanced")
        return {"Qwen3-30B-A3B-Instruct-2507", "Qwen3-4B-Instruct-2507",
                "Qwen3-30B-A3B-Instruct-2507", "Qwen3-VL-32B"};
    if (n == "full")
        return {"Qwen3-Next-80B-A3B-Instruct", "Qwen3-4B-Instruct-2507",
                "Qwen3-235B-A22B-Instruct-2507", "Qwen3-VL-32B"};
    raise(Errc::DomainError, "unknown preset: " + name + " (expected minimal|balanced|full)");
}

struct ModelEndpoint {
    std::string endpoint;
    std::string model;
    std::string api_key;
};

struct Config {
    std::string preset = "minimal";
    Policy policy = Policy::Basic;
    std::size_t k = 10;
    bool retrieval_context = true;
    bool use_images = true;
    int workers = 4;
    std::uint64_t seed = 17;
    std::string decision_backend = "rule";   // rule | llm
    std::string embedder = "fallback";       // fallback | http
    GenerationParams params;
    ModelEndpoint kgd_model, type_model, key_model, value_model, embed_model;
    ConfigMap resolved; // final merged key=value view (for the manifest)
};

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = normalize(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    raise(Errc::ParseError, "config key '" + key + "': expected boolean, got '" + value + "'");
}

inline long long parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        raise(Errc::ParseError, "config key '" + key + "': expected integer, got '" + value + "'");
    }
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        raise(Errc::ParseError, "config key '" + key + "': expected number, got '" + value + "'");
    }
}

} // namespace detail

/// Merge the layers (later wins), then materialize a typed Config.
/// `env` must already be restricted to env_key_map() targets.
inline Config resolve_config(const ConfigMap& file, const ConfigMap& env, const ConfigMap& flags) {
    ConfigMap m = file;
    for (const auto& [k, v] : env) m[k] = v;
    for (const auto& [k, v] : flags) m[k] = v;

    Config cfg;
    auto has = [&m](const char* k) { return m.find(k) != m.end(); };
    auto get = [&m](const char* k) { return m.at(k); };

    if (has("preset")) cfg.preset = normalize(get("preset"));
    PresetModels tier = preset_models(cfg.preset);
    cfg.kgd_model.model = tier.kgd;
    cfg.type_model.model = tier.type;
    cfg.key_model.model = tier.key;
    cfg.value_model.model = tier.value;
    cfg.embed_model.model = "Qwen3-Embedding-0.6B";

    if (has("policy")) {
        auto policy = policy_from_name(normalize(get("policy")));
        if (!policy)
            raise(Errc::DomainError,
                  "config key 'policy': expected basic|strict|no-discard, got '" + get("policy") +
                      "'");
        cfg.policy = *policy;
    }
    if (has("k")) {
        long long k = detail::parse_int("k", get("k"));
        if (k < 0) raise(Errc::DomainError, "config key 'k': must be >= 0");
        cfg.k = static_cast<std::size_t>(k);
    }
    if (has("retrieval_context"))
        cfg.retrieval_context = detail::parse_bool("retrieval_context", get("retrieval_context"));
    if (has("use_images")) cfg.use_images = detail::parse_bool("use_images", get("use_images"));
    if (has("workers")) {
        long long w = detail::parse_int("workers", get("workers"));
        if (w < 1) raise(Errc::DomainError, "config key 'workers': must be >= 1");
        cfg.workers = static_cast<int>(w);
    }
    if (has("seed"))
        cfg.seed = static_cast<std::uint64_t>(detail::parse_int("seed", get("seed")));
    if (has("backend")) {
        cfg.decision_backend = normalize(get("backend"));
        if (cfg.decision_backend != "rule" && cfg.decision_backend != "llm")
            raise(Errc::DomainError, "config key 'backend': expected rule|llm");
    }
    if (has("embedder")) {
        cfg.embedder = normalize(get("embedder"));
        if (cfg.embedder != "fallback" && cfg.embedder != "http")
            raise(Errc::DomainError, "config key 'embedder': expected fallback|http");
    }
    if (has("temperature"))
        cfg.params.temperature = detail::parse_double("temperature", get("temperature"));
    if (has("top_p")) cfg.params.top_p = detail::parse_double("top_p", get("top_p"));
    if (has("top_k"))
        cfg.params.top_k = static_cast<int>(detail::parse_int("top_k", get("top_k")));
    if (has("max_new_tokens"))
        cfg.params.max_new_tokens =
            static_cast<int>(detail::parse_int("max_new_tokens", get("max_new_tokens")));

    // Shared endpoint/credentials, then per-role model overrides.
    std::string endpoint = has("llm_endpoint") ? get("llm_endpoint") : "";
    std::string api_key = has("llm_api_key") ? get("llm_api_key") : "";
    for (ModelEndpoint* me : {&cfg.kgd_model, &cfg.type_model, &cfg.key_model, &cfg.value_model}) {
        me->endpoint = endpoint;
        me->api_key = api_key;
        if (has("llm_model")) me->model = get("llm_model");
    }
    if (has("kgd_model")) cfg.kgd_model.model = get("kgd_model");
    if (has("type_model")) cfg.type_model.model = get("type_model");
    if (has("key_model")) cfg.key_model.model = get("key_model");
    if (has("value_model")) cfg.value_model.model = get("value_model");
    if (has("embed_endpoint")) cfg.embed_model.endpoint = get("embed_endpoint");
    if (has("embed_model")) cfg.embed_model.model = get("embed_model");
    if (has("embed_api_key")) cfg.embed_model.api_key = get("embed_api_key");

    if (cfg.decision_backend == "llm" && cfg.kgd_model.endpoint.empty())
        raise(Errc::DomainError, "backend=llm requires llm_endpoint (flag, file, or LLM_ENDPOINT)");
    if (cfg.embedder == "http" && cfg.embed_model.endpoint.empty())
        raise(Errc::DomainError, "embedder=http requires embed_endpoint");

    cfg.resolved = std::move(m);
    return cfg;
}

/// Manifest view; credentials are redacted, never persisted.
inline ojson config_to_json(const Config& cfg) {
    ojson j;
    j["preset"] = cfg.preset;
    j["policy"] = policy_name(cfg.policy);
    j["k"] = cfg.k;
    j["retrieval_context"] = cfg.retrieval_context;
    j["use_images"] = cfg.use_images;
    j["workers"] = cfg.workers;
    j["seed"] = cfg.seed;
    j["backend"] = cfg.decision_backend;
    j["embedder"] = cfg.embedder;
    j["generation"] = {{"temperature", cfg.params.temperature},
                       {"top_p", cfg.params.top_p},
                       {"top_k", cfg.params.top_k},
                       {"max_new_tokens", cfg.params.max_new_tokens}};
    auto role = [](const ModelEndpoint& me) {
        ojson r;
        r["endpoint"] = me.endpoint;
        r["model"] = me.model;
        r["api_key"] = me.api_key.empty() ? "" : "<redacted>";
        return r;
    };
    j["models"] = {{"kgd", role(cfg.kgd_model)},
                   {"type", role(cfg.type_model)},
                   {"key", role(cfg.key_model)},
                   {"value", role(cfg.value_model)},
                   {"embedding", role(cfg.embed_model)}};
    return j;
}

} // namespace autopkg
