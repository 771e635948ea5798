#pragma once

// Deterministic synthetic marketplace corpus + scripted extraction agents.
// The agents answer from the listing's own specification block (no network,
// no model), but format their replies like chat transcripts so the full
// parsing surface is exercised: quoting/noise on type answers, markdown key
// tables, fenced JSON value maps, and a retry-worthy garbage first attempt
// for a deterministic slice of listings.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "autopkg/core.hpp"
#include "autopkg/listing.hpp"
#include "autopkg/pipeline.hpp"

namespace autopkg::synth {

struct KeySpec {
    const char* name;
    const char* description;
    std::vector<const char*> values;
};

/// Shared attribute vocabulary; type profiles reference entries by index.
inline const std::vector<KeySpec>& key_pool() {
    static const std::vector<KeySpec> pool = {
        {"Brand", "Manufacturer or trade name under which the product is sold.",
         {"Norwell", "Apex", "Lumora", "Vertex", "Orion", "Halcyon", "Pinefield", "Quanta",
          "Bluecrest", "Ironvale"}},
        {"Color", "Primary exterior color of the product.",
         {"White", "Black", "Silver", "Red", "Blue", "Green", "Gray", "Beige"}},
        {"Material", "Main material the product is made of.",
         {"ABS Plastic", "Stainless Steel", "Aluminum", "Oak Wood", "Silicone", "Tempered Glass",
          "Carbon Steel", "Nylon"}},
        {"Weight", "Net weight of a single unit.",
         {"120 g", "250 g", "500 g", "1.2 kg", "2 kg", "4.5 kg"}},
        {"Width", "Outer width of the product.", {"12 cm", "25 cm", "40 cm", "60 cm", "120 cm"}},
        {"Height", "Outer height of the product.", {"10 cm", "18 cm", "35 cm", "75 cm", "110 cm"}},
        {"Depth", "Outer depth of the product.", {"8 cm", "15 cm", "30 cm", "55 cm"}},
        {"Voltage", "Rated operating voltage.", {"5 V", "12 V", "24 V", "110 V", "230 V"}},
        {"Power", "Rated power draw or output.",
         {"15 W", "40 W", "60 W", "100 W", "500 W", "1200 W"}},
        {"Capacity", "Usable volume of the container.",
         {"250 ml", "500 ml", "1 L", "2 L", "5 L"}},
        {"Screen Size", "Diagonal display size.",
         {"13.3 in", "15.6 in", "24 in", "27 in", "32 in"}},
        {"Resolution", "Native display resolution.", {"1920x1080", "2560x1440", "3840x2160"}},
        {"Battery Capacity", "Battery charge capacity.",
         {"800 mAh", "2000 mAh", "4000 mAh", "10000 mAh"}},
        {"Connectivity", "Wireless or wired interface used to connect.",
         {"Bluetooth 5.0", "Wi-Fi 6", "USB-C", "2.4 GHz Wireless", "HDMI 2.1"}},
        {"Warranty", "Manufacturer warranty period.", {"1 year", "2 years", "3 years", "5 years"}},
        {"IP Rating", "Ingress protection rating.", {"IP44", "IP54", "IP65", "IP67"}},
        {"Pack Quantity", "Number of units per retail pack.",
         {"2-pack", "4-pack", "10-pack", "25-pack", "50-pack"}},
        {"Max Load", "Maximum supported load.", {"5 kg", "25 kg", "50 kg", "120 kg"}},
        {"Length", "Total length of the product.", {"1 m", "1.5 m", "2 m", "3 m", "5 m"}},
        {"Diameter", "Outer diameter.", {"6 mm", "8 mm", "10 mm", "12 mm"}},
        {"Thread Size", "Metric thread designation.", {"M4", "M5", "M6", "M8"}},
        {"Storage Capacity", "Persistent storage size.", {"128 GB", "256 GB", "512 GB", "1 TB"}},
        {"RAM", "Installed working memory.", {"8 GB", "16 GB", "32 GB"}},
        {"Noise Level", "Operating noise emission.", {"20 dB", "35 dB", "45 dB"}},
    };
    return pool;
}

struct TypeProfile {
    const char* canonical;          // singular, title case
    std::vector<int> keys;          // indices into key_pool(); 0 = Brand
};

inline const std::vector<TypeProfile>& type_pool() {
    static const std::vector<TypeProfile> pool = {
        {"Wall Anchor", {0, 2, 19, 20, 16, 17}},
        {"Battery Holder", {0, 2, 16, 7}},
        {"Pen Mouse", {0, 1, 13, 12, 14}},
        {"Desktop Computer", {0, 21, 22, 8, 14, 1}},
        {"Power Strip", {0, 16, 18, 7, 8, 1}},
        {"Laptop Stand", {0, 2, 17, 4, 5}},
        {"Monitor Arm", {0, 17, 10, 2, 14}},
        {"Desk Lamp", {0, 8, 1, 2, 5}},
        {"Office Chair", {0, 17, 1, 2, 5}},
        {"Standing Desk", {0, 4, 6, 17, 1}},
        {"Webcam", {0, 11, 13, 14, 1}},
        {"Mechanical Keyboard", {0, 13, 1, 14, 2}},
        {"Wireless Mouse", {0, 13, 12, 1, 14}},
        {"USB Hub", {0, 16, 13, 7, 1}},
        {"HDMI Cable", {0, 18, 14, 1}},
        {"Ethernet Cable", {0, 18, 1, 16}},
        {"Wireless Router", {0, 13, 14, 8, 7}},
        {"Network Switch", {0, 16, 8, 14}},
        {"External Hard Drive", {0, 21, 13, 3, 14}},
        {"Flash Drive", {0, 21, 13, 16, 1}},
        {"Memory Card", {0, 21, 16, 14}},
        {"Bluetooth Speaker", {0, 12, 13, 15, 8, 1}},
        {"Headphone", {0, 13, 23, 12, 1, 3}},
        {"Studio Microphone", {0, 13, 2, 14, 1}},
        {"Soundbar", {0, 8, 13, 4, 1}},
        {"Projector", {0, 11, 8, 23, 14}},
        {"Smart Bulb", {0, 8, 13, 7, 14}},
        {"Ceiling Fan", {0, 8, 23, 1, 17}},
        {"Space Heater", {0, 8, 7, 23, 14}},
        {"Air Purifier", {0, 8, 23, 14, 1}},
        {"Electric Kettle", {0, 9, 8, 2, 1}},
        {"Coffee Grinder", {0, 9, 8, 2, 23}},
        {"Toaster Oven", {0, 8, 9, 1, 14}},
        {"Blender Jar", {0, 9, 2, 1}},
        {"Water Bottle", {0, 9, 2, 1, 3}},
        {"Lunch Box", {0, 9, 2, 1}},
        {"Cutting Board", {0, 2, 4, 6, 1}},
        {"Chef Knife", {0, 2, 18, 3}},
        {"Frying Pan", {0, 2, 19, 1}},
        {"Storage Bin", {0, 9, 2, 1, 17}},
        {"Bookshelf", {0, 2, 4, 5, 17, 1}},
        {"Curtain Rod", {0, 2, 18, 19, 1}},
        {"Picture Frame", {0, 2, 4, 5, 1}},
        {"Area Rug", {0, 2, 4, 18, 1}},
        {"Throw Pillow", {0, 2, 1, 4}},
        {"Garden Hose", {0, 18, 19, 2, 1}},
        {"Pruning Shears", {0, 2, 18, 3}},
        {"Plant Pot", {0, 9, 2, 19, 1}},
        {"Bird Feeder", {0, 9, 2, 5, 1}},
        {"Solar Lantern", {0, 12, 15, 8, 1}},
        {"Bike Lock", {0, 2, 18, 3, 1}},
        {"Dash Cam", {0, 11, 21, 13, 14}},
        {"Car Jack", {0, 17, 3, 2, 14}},
        {"Tire Inflator", {0, 8, 7, 23, 14}},
        {"Socket Wrench", {0, 2, 18, 20}},
        {"Drill Bit", {0, 2, 19, 20, 16}},
        {"Claw Hammer", {0, 2, 3, 18}},
        {"Tape Measure", {0, 18, 2, 1}},
        {"Soldering Iron", {0, 8, 7, 14, 2}},
        {"Label Printer", {0, 13, 11, 14, 1}},
    };
    return pool;
}

/// Profile lookup tolerant of the surface noise the generator applies.
inline const TypeProfile* find_profile(const std::string& surface) {
    std::string norm = normalize(surface);
    for (const auto& p : type_pool()) {
        if (plural_equal(norm, normalize(p.canonical))) return &p;
    }
    return nullptr;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string pluralize_last_word(const std::string& name) {
    size_t pos = name.find_last_of(' ');
    std::string head = pos == std::string::npos ? "" : name.substr(0, pos + 1);
    std::string word = pos == std::string::npos ? name : name.substr(pos + 1);
    if (word.empty() || word.back() == 's' || word.back() == 'S') return name;
    char last = static_cast<char>(std::tolower(static_cast<unsigned char>(word.back())));
    if (last == 'x' || last == 'z' || (word.size() >= 2 && last == 'h')) return head + word + "es";
    if (last == 'y' && word.size() >= 2) {
        char prev = static_cast<char>(std::tolower(static_cast<unsigned char>(word[word.size() - 2])));
        if (prev != 'a' && prev != 'e' && prev != 'i' && prev != 'o' && prev != 'u')
            return head + word.substr(0, word.size() - 1) + "ies";
    }
    return head + word + "s";
}

inline std::string to_lower_ascii(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string to_upper_ascii(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[rng() % v.size()];
}

} // namespace detail

struct SynthOptions {
    std::uint64_t seed = 17;
    std::size_t listings = 100;
    std::size_t type_count = 12;   // drawn from the front of type_pool()
    double junk_rate = 0.06;       // listings with no induceable type
    double plural_rate = 0.35;
    double lower_rate = 0.15;
    double upper_rate = 0.05;
    double pad_rate = 0.10;        // stray whitespace around the type surface
};

struct SynthCorpus {
    std::vector<Listing> listings;
    ojson truth; // {"types": [...], "listings": {id: {"type": ..., "surface": ...}}}
};

/// Apply pluralization/casing/whitespace noise to a canonical type name.
inline std::string noisy_surface(const std::string& canonical, std::mt19937_64& rng,
                                 const SynthOptions& opt) {
    auto roll = [&rng] { return (rng() % 10000) / 10000.0; };
    std::string s = canonical;
    if (roll() < opt.plural_rate) s = detail::pluralize_last_word(s);
    double c = roll();
    if (c < opt.lower_rate)
        s = detail::to_lower_ascii(s);
    else if (c < opt.lower_rate + opt.upper_rate)
        s = detail::to_upper_ascii(s);
    if (roll() < opt.pad_rate) s = " " + s + "  ";
    return s;
}

inline SynthCorpus generate(const SynthOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    const auto& pool = type_pool();
    const auto& keys = key_pool();
    std::size_t ntypes = std::min(opt.type_count, pool.size());

    SynthCorpus out;
    out.truth["types"] = ojson::array();
    for (std::size_t i = 0; i < ntypes; ++i) out.truth["types"].push_back(pool[i].canonical);
    out.truth["listings"] = ojson::object();

    for (std::size_t n = 0; n < opt.listings; ++n) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "L%04zu", n + 1);
        Listing l;
        l.id = idbuf;

        bool junk = ((rng() % 10000) / 10000.0) < opt.junk_rate;
        if (junk) {
            l.title = "Clearance mystery box lot " + std::to_string(n + 1);
            l.description = "Assorted warehouse returns sold as-is. Contents vary.";
            l.specifications["Condition"] = {"Used - acceptable"};
            out.truth["listings"][l.id] = {{"type", nullptr}, {"surface", nullptr}};
            out.listings.push_back(std::move(l));
            continue;
        }

        const TypeProfile& profile = pool[rng() % ntypes];
        std::string surface = noisy_surface(profile.canonical, rng, opt);

        std::string brand;
        std::vector<std::pair<std::string, std::vector<std::string>>> facts;
        for (int ki : profile.keys) {
            const KeySpec& spec = keys[static_cast<size_t>(ki)];
            std::vector<std::string> vals;
            vals.push_back(detail::pick(spec.values, rng));
            // Color occasionally comes in two variants (exercises JSON lists).
            if (std::string(spec.name) == "Color" && rng() % 4 == 0) {
                std::string second = detail::pick(spec.values, rng);
                if (second != vals[0]) vals.push_back(second);
            }
            if (std::string(spec.name) == "Brand") brand = vals[0];
            facts.emplace_back(spec.name, std::move(vals));
        }

        std::string flavor = facts.size() > 1 ? facts[1].second[0] : "";
        l.title = (brand.empty() ? "Generic" : brand) + " " + profile.canonical +
                  (flavor.empty() ? "" : " " + flavor);
        l.highlights = std::string("- Durable build\n- Easy to install\n- ") +
                       profile.canonical + " for everyday use";
        l.description = "The " + l.title + " is a reliable " +
                        detail::to_lower_ascii(profile.canonical) +
                        " designed for daily use around the home or office.";
        l.specifications["product_type"] = {surface};
        for (auto& [k, v] : facts) l.specifications[k] = v;
        l.specifications["SKU"] = {"SKU-" + std::to_string(100000 + (rng() % 900000))};
        size_t nimg = rng() % 4;
        for (size_t i = 0; i < nimg; ++i)
            l.image_refs.push_back("img://" + l.id + "/" + std::to_string(i + 1));

        out.truth["listings"][l.id] = {{"type", profile.canonical}, {"surface", surface}};
        out.listings.push_back(std::move(l));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scripted agents. Pure functions of their inputs (reply dressing is keyed on
// a hash of the listing/type), so concurrent prefetch and replay both stay
// deterministic.
// ---------------------------------------------------------------------------

class SpecTypeAgent final : public TypeAgent {
  public:
    std::string suggest(const Listing& l, const std::string&, int attempt) override {
        auto it = l.specifications.find("product_type");
        if (it == l.specifications.end() || it->second.empty()) return "None";
        const std::string& surface = it->second[0];
        std::uint64_t h = detail::fnv1a(l.id);
        // A deterministic slice answers with chatty multi-line text first, to
        // exercise the strict-parse-and-retry path.
        if (attempt == 0 && h % 17 == 0)
            return "Let me think about this listing.\nIt looks like a " + surface + ".";
        switch (h % 4) {
            case 0: return "`" + surface + "`";
            case 1: return surface + ".";
            case 2: return "\"" + surface + "\"";
            default: return surface;
        }
    }
    std::string id() const override { return "synth:spec-type"; }
};

class ProfileKeyAgent final : public KeyAgent {
  public:
    std::string discover(const std::string& type_name, const std::string&, const std::string&,
                         int) override {
        const TypeProfile* profile = find_profile(type_name);
        std::string out = "| Attribute Name | Description | Examples |\n"
                          "|---|---|---|\n";
        auto row = [&out](const KeySpec& spec) {
            std::string ex;
            size_t n = std::min<size_t>(5, spec.values.size());
            for (size_t i = 0; i < n; ++i) {
                if (i) ex += ", ";
                ex += spec.values[i];
            }
            out += std::string("| ") + spec.name + " | " + spec.description + " | " + ex + " |\n";
        };
        if (profile) {
            for (int ki : profile->keys) row(key_pool()[static_cast<size_t>(ki)]);
        } else {
            row(key_pool()[0]);
            row(key_pool()[1]);
            row(key_pool()[2]);
        }
        return out;
    }
    std::string id() const override { return "synth:profile-key"; }
};

class SpecValueAgent final : public ValueAgent {
  public:
    std::string extract(const Listing& l, const KeyTable& table, const std::string&,
                        const std::vector<std::string>&, int) override {
        ojson reply = ojson::object();
        for (const auto& row : table.rows) {
            auto it = l.specifications.find(row.name);
            if (it == l.specifications.end()) {
                // plural/case tolerant second pass
                for (const auto& [k, v] : l.specifications) {
                    if (plural_equal(normalize(k), normalize(row.name))) {
                        it = l.specifications.find(k);
                        break;
                    }
                }
            }
            std::string key = std::to_string(row.key_id);
            if (it == l.specifications.end() || it->second.empty()) {
                if (detail::fnv1a(l.id + key) % 3 == 0) reply[key] = nullptr;
                continue;
            }
            if (it->second.size() == 1)
                reply[key] = it->second[0];
            else
                reply[key] = it->second;
        }
        std::uint64_t h = detail::fnv1a(l.id);
        std::string json = h % 2 ? reply.dump(2) : reply.dump();
        if (h % 3 == 0)
            return "Here is the extracted attribute map:\n```json\n" + json + "\n```\n";
        return json;
    }
    std::string id() const override { return "synth:spec-value"; }
};

} // namespace autopkg::synth
