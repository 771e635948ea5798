#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autopkg/core.hpp"
#include "autopkg/error.hpp"

namespace autopkg {

/// Which dedup contract governs a decision: Basic trusts the judge broadly,
/// Strict only admits true synonyms, NoDiscard removes the reject option.
enum class Policy { Basic, Strict, NoDiscard };

inline const char* policy_name(Policy p) {
    switch (p) {
        case Policy::Basic: return "basic";
        case Policy::Strict: return "strict";
        case Policy::NoDiscard: return "no-discard";
    }
    return "?";
}

inline std::optional<Policy> policy_from_name(std::string_view s) {
    if (s == "basic") return Policy::Basic;
    if (s == "strict") return Policy::Strict;
    if (s == "no-discard" || s == "no_discard" || s == "nodiscard") return Policy::NoDiscard;
    return std::nullopt;
}

enum class ActionType { Add, Merge, Replace, Discard };

inline const char* action_name(ActionType a) {
    switch (a) {
        case ActionType::Add: return "ADD";
        case ActionType::Merge: return "MERGE";
        case ActionType::Replace: return "REPLACE";
        case ActionType::Discard: return "DISCARD";
    }
    return "?";
}

struct EditAction {
    ActionType type = ActionType::Discard;
    NodeId target = 0; // meaningful for Merge/Replace only
};

/// An edge the candidate wants to exist once it resolves to a node. The
/// candidate occupies one endpoint ("self"), the other is an existing node.
struct IntendedEdge {
    EdgeKind kind = EdgeKind::HasValue;
    bool self_is_src = false;
    NodeId other = 0;
};

/// A proposed node: what an extraction agent wants written, before the
/// decision gate has ruled on it.
struct Candidate {
    NodeKind kind = NodeKind::Value;
    std::string name;
    std::optional<std::string> description;
    std::string origin; // provenance: "<agent>:<listing id>"
    std::vector<IntendedEdge> intended_edges;
};

inline Candidate make_type_candidate(std::string name, std::string description,
                                     std::string origin) {
    Candidate c;
    c.kind = NodeKind::ProductType;
    c.name = std::move(name);
    c.description = std::move(description);
    c.origin = std::move(origin);
    return c;
}

inline Candidate make_key_candidate(std::string name, std::string description, NodeId type_node,
                                    std::string origin) {
    Candidate c;
    c.kind = NodeKind::AttributeKey;
    c.name = std::move(name);
    c.description = std::move(description);
    c.origin = std::move(origin);
    c.intended_edges.push_back({EdgeKind::HasKey, false, type_node});
    return c;
}

inline Candidate make_value_candidate(std::string raw_value, NodeId key_node, NodeId product_node,
                                      std::string origin) {
    Candidate c;
    c.kind = NodeKind::Value;
    c.name = std::move(raw_value);
    c.origin = std::move(origin);
    c.intended_edges.push_back({EdgeKind::HasValue, false, key_node});
    c.intended_edges.push_back({EdgeKind::HasAttribute, false, product_node});
    return c;
}

inline Candidate make_product_candidate(std::string listing_id, std::string title,
                                        NodeId type_node) {
    Candidate c;
    c.kind = NodeKind::Product;
    c.name = std::move(listing_id);
    c.description = std::move(title);
    c.origin = "pipeline:" + c.name;
    c.intended_edges.push_back({EdgeKind::OfType, true, type_node});
    return c;
}

} // namespace autopkg
