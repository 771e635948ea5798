#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "autopkg/core.hpp"
#include "autopkg/error.hpp"

namespace autopkg {

namespace detail {

inline std::string trim(std::string_view s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(a, b - a + 1));
}

inline std::string first_nonempty_line(std::string_view text) {
    size_t begin = 0;
    while (begin <= text.size()) {
        size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string line = trim(text.substr(begin, end - begin));
        if (!line.empty()) return line;
        if (end == text.size()) break;
        begin = end + 1;
    }
    return {};
}

inline size_t word_count(std::string_view s) {
    size_t words = 0;
    bool in_word = false;
    for (char c : s) {
        bool space = c == ' ' || c == '\t';
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Product-type replies: a single short line, or None to abstain
// ---------------------------------------------------------------------------

/// Returns the cleaned type name, or nullopt when the model abstained.
/// Raises ParseError on anything that does not look like a bare type line
/// (the caller is expected to retry once).
inline std::optional<std::string> parse_type_answer(std::string_view text) {
    std::string whole = detail::trim(text);
    if (whole.find('\n') != std::string::npos)
        raise(Errc::ParseError, "type reply spans multiple lines");
    std::string line = detail::first_nonempty_line(whole);
    if (line.empty()) raise(Errc::ParseError, "type reply is empty");
    // Tolerate `None` / "None" quoting styles.
    while (line.size() >= 2 &&
           ((line.front() == '`' && line.back() == '`') ||
            (line.front() == '"' && line.back() == '"') ||
            (line.front() == '\'' && line.back() == '\'')))
        line = detail::trim(line.substr(1, line.size() - 2));
    if (line.empty()) raise(Errc::ParseError, "type reply is empty after unquoting");
    if (!line.empty() && line.back() == '.') {
        line.pop_back();
        line = detail::trim(line);
    }
    if (line.empty()) raise(Errc::ParseError, "type reply is empty after cleanup");
    if (normalize(line) == "none") return std::nullopt;
    if (line.size() > 64)
        raise(Errc::ParseError, "type reply too long (" + std::to_string(line.size()) + " chars)");
    if (detail::word_count(line) > 6)
        raise(Errc::ParseError, "type reply has too many words: '" + line + "'");
    if (line.find('{') != std::string::npos || line.find('|') != std::string::npos ||
        line.find(':') != std::string::npos)
        raise(Errc::ParseError, "type reply is not a bare type name: '" + line + "'");
    return line;
}

// ---------------------------------------------------------------------------
// Markdown pipe tables
// ---------------------------------------------------------------------------

/// Splits one "| a | b | c |" line into trimmed cells. Returns empty for
/// lines that are not pipe rows or are separator rows (|---|---|).
inline std::vector<std::string> split_table_row(std::string_view line) {
    std::string trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() != '|') return {};
    std::vector<std::string> cells;
    size_t pos = 1; // skip leading pipe
    while (pos <= trimmed.size()) {
        size_t bar = trimmed.find('|', pos);
        if (bar == std::string::npos) {
            std::string tail = detail::trim(std::string_view(trimmed).substr(pos));
            if (!tail.empty()) cells.push_back(std::move(tail));
            break;
        }
        cells.push_back(detail::trim(std::string_view(trimmed).substr(pos, bar - pos)));
        pos = bar + 1;
    }
    while (!cells.empty() && cells.back().empty()) cells.pop_back();
    bool separator = !cells.empty() &&
                     std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
                         return !c.empty() && c.find_first_not_of("-: ") == std::string::npos;
                     });
    if (separator) return {};
    return cells;
}

/// All data rows of every pipe table in the text, in order. Separator rows
/// are dropped; nothing else is interpreted.
inline std::vector<std::vector<std::string>> parse_markdown_table(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    size_t begin = 0;
    while (begin <= text.size()) {
        size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        auto cells = split_table_row(text.substr(begin, end - begin));
        if (!cells.empty()) rows.push_back(std::move(cells));
        if (end == text.size()) break;
        begin = end + 1;
    }
    return rows;
}

struct RawKeyRow {
    std::string name;
    std::string description;
    std::vector<std::string> examples;
};

inline std::vector<std::string> split_examples(std::string_view cell) {
    std::vector<std::string> out;
    size_t begin = 0;
    while (begin <= cell.size()) {
        size_t comma = cell.find(',', begin);
        if (comma == std::string_view::npos) comma = cell.size();
        std::string item = detail::trim(cell.substr(begin, comma - begin));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == cell.size()) break;
        begin = comma + 1;
    }
    return out;
}

/// Parses the key-discovery reply (| Attribute Name | Description | Examples |).
/// Header rows are recognized and dropped; rows with fewer than three cells
/// are skipped with a warning. No usable rows at all is a TableParseError.
inline std::vector<RawKeyRow> parse_key_table(std::string_view text,
                                              std::vector<std::string>* warnings = nullptr) {
    auto warn = [&](std::string msg) {
        if (warnings) warnings->push_back(std::move(msg));
    };
    std::vector<RawKeyRow> rows;
    bool saw_any_row = false;
    for (auto& cells : parse_markdown_table(text)) {
        saw_any_row = true;
        std::string head = normalize(cells[0]);
        if (head == "attribute name" || head == "attribute id") continue; // header
        if (cells.size() < 3) {
            warn("table row with " + std::to_string(cells.size()) + " cells skipped: '" +
                 cells[0] + "'");
            continue;
        }
        if (normalize(cells[0]).empty()) {
            warn("table row with empty attribute name skipped");
            continue;
        }
        RawKeyRow row;
        row.name = cells[0];
        row.description = cells[1];
        row.examples = split_examples(cells[2]);
        rows.push_back(std::move(row));
    }
    if (rows.empty() && !saw_any_row)
        raise(Errc::TableParseError, "reply contains no markdown table rows");
    return rows;
}

// ---------------------------------------------------------------------------
// Value-extraction replies: JSON keyed by attribute id
// ---------------------------------------------------------------------------

namespace detail {

/// Converts one scalar JSON value into its string form for node creation.
/// Numbers render in plain decimal so "3" and 3 resolve identically.
inline std::optional<std::string> value_to_string(const nlohmann::ordered_json& v) {
    if (v.is_null()) return std::nullopt;
    if (v.is_string()) {
        std::string s = trim(v.get<std::string>());
        if (s.empty()) return std::nullopt;
        return s;
    }
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    if (v.is_number()) return v.dump();
    return v.dump(); // nested structures: keep the raw JSON text
}

} // namespace detail

struct ValueEntry {
    NodeId key_id = 0;
    std::vector<std::string> values; // nonempty strings, reply order
};

/// Parses the extraction JSON. Fences and prose around the object are
/// tolerated (first '{' to last '}'). Unknown attribute ids are dropped with
/// a warning; null and empty values are skipped; scalars become one-element
/// lists. Unparseable JSON raises JsonParseError (caller retries once).
inline std::vector<ValueEntry> parse_value_json(std::string_view text,
                                                const std::set<NodeId>& valid_ids,
                                                std::vector<std::string>* warnings = nullptr) {
    auto warn = [&](std::string msg) {
        if (warnings) warnings->push_back(std::move(msg));
    };
    size_t open = text.find('{');
    size_t close = text.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        raise(Errc::JsonParseError, "reply contains no JSON object");
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text.substr(open, close - open + 1));
    } catch (const nlohmann::json::parse_error& ex) {
        raise(Errc::JsonParseError, std::string("invalid extraction JSON: ") + ex.what());
    }
    if (!j.is_object()) raise(Errc::JsonParseError, "extraction JSON is not an object");

    std::vector<ValueEntry> out;
    for (const auto& [key, value] : j.items()) {
        NodeId id = 0;
        bool numeric = !key.empty() && std::all_of(key.begin(), key.end(), [](unsigned char c) {
            return std::isdigit(c);
        });
        if (numeric) {
            try {
                id = std::stoll(key);
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric || !valid_ids.count(id)) {
            warn("unknown attribute id '" + key + "' dropped");
            continue;
        }
        ValueEntry entry;
        entry.key_id = id;
        if (value.is_array()) {
            for (const auto& item : value)
                if (auto s = detail::value_to_string(item)) entry.values.push_back(std::move(*s));
        } else if (auto s = detail::value_to_string(value)) {
            entry.values.push_back(std::move(*s));
        }
        if (!entry.values.empty()) out.push_back(std::move(entry));
    }
    return out;
}

} // namespace autopkg
