#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autopkg/error.hpp"

namespace autopkg {

using NodeId = std::int64_t;

enum class NodeKind : std::uint8_t { Product = 0, ProductType = 1, AttributeKey = 2, Value = 3 };
enum class EdgeKind : std::uint8_t { OfType = 0, HasKey = 1, HasValue = 2, HasAttribute = 3 };

inline constexpr int kNodeKindCount = 4;
inline constexpr int kEdgeKindCount = 4;

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Product: return "Product";
        case NodeKind::ProductType: return "ProductType";
        case NodeKind::AttributeKey: return "AttributeKey";
        case NodeKind::Value: return "Value";
    }
    return "?";
}

/// Human-facing kind label as it appears in decision prompts ("Product Type").
inline const char* node_kind_label(NodeKind k) {
    switch (k) {
        case NodeKind::Product: return "Product";
        case NodeKind::ProductType: return "Product Type";
        case NodeKind::AttributeKey: return "Attribute Key";
        case NodeKind::Value: return "Value";
    }
    return "?";
}

inline const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::OfType: return "of_type";
        case EdgeKind::HasKey: return "has_key";
        case EdgeKind::HasValue: return "has_value";
        case EdgeKind::HasAttribute: return "has_attribute";
    }
    return "?";
}

inline std::optional<NodeKind> node_kind_from_name(std::string_view s) {
    if (s == "Product") return NodeKind::Product;
    if (s == "ProductType") return NodeKind::ProductType;
    if (s == "AttributeKey") return NodeKind::AttributeKey;
    if (s == "Value") return NodeKind::Value;
    return std::nullopt;
}

inline std::optional<EdgeKind> edge_kind_from_name(std::string_view s) {
    if (s == "of_type") return EdgeKind::OfType;
    if (s == "has_key") return EdgeKind::HasKey;
    if (s == "has_value") return EdgeKind::HasValue;
    if (s == "has_attribute") return EdgeKind::HasAttribute;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Text normalization
//
// Canonical-name matching is done on a normalized form: trimmed, internal
// whitespace collapsed to single spaces, and case-folded. Folding covers the
// ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic ranges; other
// codepoints pass through unchanged. Display casing is preserved elsewhere.
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_space_cp(char32_t cp) {
    if (cp == 0x20 || (cp >= 0x09 && cp <= 0x0D)) return true;
    switch (cp) {
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

inline char32_t fold_cp(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    // Latin-1 supplement, skipping the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    // Latin Extended-A: upper/lower pairs alternate.
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    // Greek.
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
    // Cyrillic.
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

/// Decodes one UTF-8 codepoint at `i`; on malformed input consumes a single
/// byte and reports it as-is.
inline char32_t decode_utf8(std::string_view s, size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](size_t off) {
        return i + off < s.size() &&
               (static_cast<unsigned char>(s[i + off]) & 0xC0) == 0x80;
    };
    if (b0 < 0x80) { i += 1; return b0; }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        char32_t cp = (b0 & 0x1F) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        char32_t cp = (b0 & 0x0F) << 12 |
                      (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        char32_t cp = (b0 & 0x07) << 18 |
                      (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12 |
                      (static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6 |
                      (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        i += 4;
        return cp;
    }
    i += 1;
    return b0;
}

inline void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

} // namespace detail

inline std::string normalize(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    size_t i = 0;
    while (i < s.size()) {
        char32_t cp = detail::decode_utf8(s, i);
        if (detail::is_space_cp(cp)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        detail::encode_utf8(detail::fold_cp(cp), out);
    }
    return out;
}

inline size_t codepoint_count(std::string_view s) {
    size_t n = 0;
    for (size_t i = 0; i < s.size();) {
        detail::decode_utf8(s, i);
        ++n;
    }
    return n;
}

/// Heuristic singular form of the last word of an already-normalized string.
/// Good enough to collapse marketplace pluralization noise; not a lemmatizer.
inline std::string depluralize(std::string_view normalized) {
    size_t start = normalized.rfind(' ');
    start = (start == std::string_view::npos) ? 0 : start + 1;
    std::string_view head = normalized.substr(0, start);
    std::string word(normalized.substr(start));

    auto ends = [&](std::string_view suffix) {
        return word.size() >= suffix.size() &&
               std::string_view(word).substr(word.size() - suffix.size()) == suffix;
    };
    if (ends("ies") && word.size() > 3) {
        word.replace(word.size() - 3, 3, "y");
    } else if ((ends("sses") || ends("ches") || ends("shes") || ends("xes") || ends("zes")) &&
               word.size() > 4) {
        word.erase(word.size() - 2);
    } else if (ends("s") && !ends("ss") && !ends("us") && !ends("is") && word.size() > 1) {
        word.pop_back();
    }
    return std::string(head) + word;
}

/// True when two normalized strings are equal up to trailing-word pluralization.
inline bool plural_equal(std::string_view a, std::string_view b) {
    if (a == b) return true;
    std::string da = depluralize(a);
    std::string db = depluralize(b);
    return da == b || a == db || da == db;
}

} // namespace autopkg
