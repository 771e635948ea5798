#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "autopkg/error.hpp"
#include "autopkg/graph.hpp"

namespace autopkg {

inline constexpr size_t kMaxImagesPerListing = 10;

/// One marketplace listing as it arrives from the corpus.
struct Listing {
    std::string id;
    std::string title;
    std::optional<std::string> highlights;
    std::optional<std::string> description;
    std::map<std::string, std::vector<std::string>> specifications;
    std::vector<std::string> image_refs; // opaque locators, never decoded here
};

/// Attribute schema of one product type: rows in buyer-importance order.
/// Example values are guidance for extraction prompts, not graph values.
struct KeyTableRow {
    NodeId key_id = 0;
    std::string name;
    std::string description;
    std::vector<std::string> examples;
};

struct KeyTable {
    NodeId product_type = 0;
    std::vector<KeyTableRow> rows;
};

inline ojson listing_to_json(const Listing& l) {
    ojson j;
    j["id"] = l.id;
    j["title"] = l.title;
    if (l.highlights)
        j["highlights"] = *l.highlights;
    else
        j["highlights"] = nullptr;
    if (l.description)
        j["description"] = *l.description;
    else
        j["description"] = nullptr;
    j["specifications"] = ojson::object();
    for (const auto& [k, vs] : l.specifications) j["specifications"][k] = vs;
    j["image_refs"] = l.image_refs;
    return j;
}

inline Listing listing_from_json(const ojson& j) {
    Listing l;
    try {
        l.id = j.at("id").get<std::string>();
        l.title = j.at("title").get<std::string>();
        if (j.contains("highlights") && !j.at("highlights").is_null())
            l.highlights = j.at("highlights").get<std::string>();
        if (j.contains("description") && !j.at("description").is_null())
            l.description = j.at("description").get<std::string>();
        if (j.contains("specifications") && !j.at("specifications").is_null()) {
            for (const auto& [k, v] : j.at("specifications").items()) {
                std::vector<std::string> vals;
                if (v.is_array())
                    for (const auto& x : v) vals.push_back(x.is_string() ? x.get<std::string>() : x.dump());
                else if (v.is_string())
                    vals.push_back(v.get<std::string>());
                else
                    vals.push_back(v.dump());
                l.specifications[k] = std::move(vals);
            }
        }
        if (j.contains("image_refs") && !j.at("image_refs").is_null())
            for (const auto& x : j.at("image_refs")) l.image_refs.push_back(x.get<std::string>());
    } catch (const std::exception& ex) {
        raise(Errc::ParseError, std::string("malformed listing: ") + ex.what());
    }
    if (l.id.empty()) raise(Errc::ParseError, "listing id is empty");
    if (l.title.empty()) raise(Errc::ParseError, "listing '" + l.id + "' has an empty title");
    if (l.image_refs.size() > kMaxImagesPerListing)
        raise(Errc::ParseError, "listing '" + l.id + "' carries " +
                                    std::to_string(l.image_refs.size()) +
                                    " images (max " + std::to_string(kMaxImagesPerListing) + ")");
    return l;
}

/// Reads a JSON-lines corpus. Duplicate ids and malformed lines are hard
/// errors — a corpus is an input contract, not something to repair silently.
inline std::vector<Listing> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open corpus '" + path + "'");
    std::vector<Listing> out;
    std::set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ojson j;
        try {
            j = ojson::parse(line);
        } catch (const nlohmann::json::parse_error& ex) {
            raise(Errc::ParseError,
                  path + ":" + std::to_string(lineno) + ": invalid JSON: " + ex.what());
        }
        Listing l;
        try {
            l = listing_from_json(j);
        } catch (const Error& ex) {
            raise(Errc::ParseError, path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
        if (!seen.insert(l.id).second)
            raise(Errc::ParseError,
                  path + ":" + std::to_string(lineno) + ": duplicate listing id '" + l.id + "'");
        out.push_back(std::move(l));
    }
    return out;
}

inline void save_corpus(const std::string& path, const std::vector<Listing>& listings) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot open '" + path + "' for writing");
    for (const auto& l : listings) out << listing_to_json(l).dump() << "\n";
    if (!out) raise(Errc::IoError, "failed writing '" + path + "'");
}

/// Compact JSON rendering of the specifications map, as embedded in prompts.
inline std::string specifications_json(const Listing& l) {
    ojson j = ojson::object();
    for (const auto& [k, vs] : l.specifications) j[k] = vs;
    return j.dump();
}

} // namespace autopkg
