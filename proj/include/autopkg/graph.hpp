#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "autopkg/core.hpp"
#include "autopkg/error.hpp"

namespace autopkg {

using ojson = nlohmann::ordered_json;

struct CanonicalNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::Product;
    std::string name;            // display form
    std::string normalized_name; // matching form, derived
    std::optional<std::string> description;
    std::vector<std::string> synonyms;            // display forms, insertion order
    std::vector<std::string> normalized_synonyms; // parallel to synonyms
    std::int64_t created_at = 0;                  // logical creation tick
};

struct Edge {
    NodeId src = 0;
    EdgeKind kind = EdgeKind::OfType;
    NodeId dst = 0;
};

/// One graph mutation traced back to the decision that caused it.
struct AuditRecord {
    std::int64_t seq = 0;
    NodeKind kind = NodeKind::Value;
    std::string candidate;    // surface form that was proposed
    std::optional<std::string> candidate_description; // kept here even when the
                                                      // graph ignores it (merge/replace)
    std::string action;       // ADD | MERGE | REPLACE | DISCARD
    std::optional<NodeId> target;
    std::string backend;      // which decision backend answered
    std::int64_t timestamp = 0; // logical time; equals seq unless a caller overrides
    std::string note;
};

struct GraphStats {
    size_t nodes[kNodeKindCount] = {0, 0, 0, 0};
    size_t edges[kEdgeKindCount] = {0, 0, 0, 0};
    size_t node_total() const { return nodes[0] + nodes[1] + nodes[2] + nodes[3]; }
    size_t edge_total() const { return edges[0] + edges[1] + edges[2] + edges[3]; }
};

inline constexpr int kSnapshotFormatVersion = 1;

/// In-memory property-knowledge graph with canonical (deduplicated) labels.
///
/// All lookups that feed dedup decisions go through normalized names; a
/// per-kind claims table maps every normalized name and synonym to its owning
/// node, so label collisions are impossible by construction. Edge insertion
/// enforces the schema: endpoint kinds per edge kind, single typing per
/// product, exactly one key parent per value, and attribute assertions only
/// where the product's type carries the key.
class Graph {
  public:
    // -- node operations ----------------------------------------------------

    NodeId add_node(NodeKind kind, std::string_view name,
                    std::optional<std::string> description = std::nullopt,
                    const std::vector<std::string>& synonyms = {}) {
        CanonicalNode n;
        n.id = next_id_;
        n.kind = kind;
        n.name = std::string(name);
        n.normalized_name = normalize(name);
        n.description = std::move(description);
        if (n.normalized_name.empty()) raise(Errc::EmptyName, "node name is empty after normalization");
        check_claim(kind, n.normalized_name, 0, Errc::DuplicateName);
        for (const auto& s : synonyms) {
            std::string ns = normalize(s);
            if (ns.empty()) raise(Errc::EmptyName, "synonym is empty after normalization");
            if (ns == n.normalized_name) continue;
            if (std::find(n.normalized_synonyms.begin(), n.normalized_synonyms.end(), ns) !=
                n.normalized_synonyms.end())
                continue;
            check_claim(kind, ns, 0, Errc::CrossNodeConflict);
            n.synonyms.push_back(s);
            n.normalized_synonyms.push_back(std::move(ns));
        }
        n.created_at = next_created_++;
        NodeId id = next_id_++;
        claims_[static_cast<int>(kind)][n.normalized_name] = id;
        for (const auto& ns : n.normalized_synonyms) claims_[static_cast<int>(kind)][ns] = id;
        nodes_.emplace(id, std::move(n));
        return id;
    }

    /// Adds a display synonym. Returns false when the label already belongs to
    /// this node (no-op); raises CrossNodeConflict when another node owns it.
    bool add_synonym(NodeId id, std::string_view display) {
        CanonicalNode& n = mut(id);
        std::string ns = normalize(display);
        if (ns.empty()) raise(Errc::EmptyName, "synonym is empty after normalization");
        auto& claims = claims_[static_cast<int>(n.kind)];
        auto it = claims.find(ns);
        if (it != claims.end()) {
            if (it->second == id) return false;
            raise(Errc::CrossNodeConflict,
                  "label '" + std::string(display) + "' already belongs to node " +
                      std::to_string(it->second));
        }
        claims[ns] = id;
        n.synonyms.emplace_back(display);
        n.normalized_synonyms.push_back(std::move(ns));
        return true;
    }

    /// Renames the node; the old display name is retained as a synonym. Used
    /// when a proposed label supersedes the stored one.
    void replace_label(NodeId id, std::string_view new_display) {
        CanonicalNode& n = mut(id);
        std::string ns = normalize(new_display);
        if (ns.empty()) raise(Errc::EmptyName, "replacement name is empty after normalization");
        auto& claims = claims_[static_cast<int>(n.kind)];
        auto it = claims.find(ns);
        if (it != claims.end() && it->second != id)
            raise(Errc::CrossNodeConflict,
                  "label '" + std::string(new_display) + "' already belongs to node " +
                      std::to_string(it->second));
        if (ns == n.normalized_name) {
            n.name = std::string(new_display); // casing refresh only
            return;
        }
        // Demote current name to a synonym, promote the new one.
        n.synonyms.push_back(n.name);
        n.normalized_synonyms.push_back(n.normalized_name);
        for (size_t i = 0; i < n.normalized_synonyms.size();) {
            if (n.normalized_synonyms[i] == ns && i + 1 != n.normalized_synonyms.size()) {
                n.synonyms.erase(n.synonyms.begin() + static_cast<std::ptrdiff_t>(i));
                n.normalized_synonyms.erase(n.normalized_synonyms.begin() +
                                            static_cast<std::ptrdiff_t>(i));
            } else {
                ++i;
            }
        }
        n.name = std::string(new_display);
        n.normalized_name = ns;
        claims[ns] = id;
    }

    // -- edge operations ----------------------------------------------------

    /// Inserts an edge, enforcing the schema. Re-adding an existing edge is a
    /// no-op (returns false).
    bool add_edge(NodeId src, EdgeKind kind, NodeId dst) {
        const CanonicalNode& s = node(src);
        const CanonicalNode& d = node(dst);
        static constexpr NodeKind expect[kEdgeKindCount][2] = {
            {NodeKind::Product, NodeKind::ProductType},
            {NodeKind::ProductType, NodeKind::AttributeKey},
            {NodeKind::AttributeKey, NodeKind::Value},
            {NodeKind::Product, NodeKind::Value},
        };
        int ek = static_cast<int>(kind);
        if (s.kind != expect[ek][0] || d.kind != expect[ek][1])
            raise(Errc::KindMismatch, std::string(edge_kind_name(kind)) + " edge cannot connect " +
                                          node_kind_name(s.kind) + " -> " + node_kind_name(d.kind));
        if (edge_set_.count({src, ek, dst})) return false;
        switch (kind) {
            case EdgeKind::OfType: {
                auto it = of_type_.find(src);
                if (it != of_type_.end())
                    raise(Errc::DoubleTyping, "product " + std::to_string(src) +
                                                  " is already typed as node " +
                                                  std::to_string(it->second));
                of_type_[src] = dst;
                break;
            }
            case EdgeKind::HasKey:
                keys_of_type_[src].push_back(dst);
                break;
            case EdgeKind::HasValue: {
                auto it = value_parent_.find(dst);
                if (it != value_parent_.end())
                    raise(Errc::DoubleTyping, "value " + std::to_string(dst) +
                                                  " already belongs to key " +
                                                  std::to_string(it->second));
                value_parent_[dst] = src;
                values_of_key_[src].push_back(dst);
                break;
            }
            case EdgeKind::HasAttribute: {
                auto tp = of_type_.find(src);
                auto kp = value_parent_.find(dst);
                bool licensed = false;
                if (tp != of_type_.end() && kp != value_parent_.end()) {
                    const auto& keys = keys_of_type_[tp->second];
                    licensed = std::find(keys.begin(), keys.end(), kp->second) != keys.end();
                }
                if (!licensed)
                    raise(Errc::UnlicensedAssertion,
                          "attribute edge " + std::to_string(src) + " -> " + std::to_string(dst) +
                              " lacks a matching typing/key path");
                attrs_of_product_[src].push_back(dst);
                break;
            }
        }
        edge_set_.insert({src, ek, dst});
        edges_.push_back({src, kind, dst});
        return true;
    }

    bool has_edge(NodeId src, EdgeKind kind, NodeId dst) const {
        return edge_set_.count({src, static_cast<int>(kind), dst}) > 0;
    }

    // -- lookups --------------------------------------------------------------

    bool exists(NodeId id) const { return nodes_.count(id) > 0; }

    const CanonicalNode& node(NodeId id) const {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) raise(Errc::UnknownNode, "no node with id " + std::to_string(id));
        return it->second;
    }

    std::optional<NodeId> find(NodeKind kind, std::string_view raw_label) const {
        const auto& claims = claims_[static_cast<int>(kind)];
        auto it = claims.find(normalize(raw_label));
        if (it == claims.end()) return std::nullopt;
        return it->second;
    }

    std::vector<NodeId> ids_of_kind(NodeKind kind) const {
        std::vector<NodeId> out;
        for (const auto& [id, n] : nodes_)
            if (n.kind == kind) out.push_back(id);
        return out; // id-ordered: nodes_ is an ordered map
    }

    size_t node_count() const { return nodes_.size(); }
    size_t edge_count() const { return edges_.size(); }

    size_t count_of_kind(NodeKind kind) const {
        size_t n = 0;
        for (const auto& [id, node] : nodes_)
            if (node.kind == kind) ++n;
        return n;
    }

    size_t count_of_edge_kind(EdgeKind kind) const {
        size_t n = 0;
        for (const auto& e : edges_)
            if (e.kind == kind) ++n;
        return n;
    }

    GraphStats stats() const {
        GraphStats s;
        for (const auto& [id, n] : nodes_) ++s.nodes[static_cast<int>(n.kind)];
        for (const auto& e : edges_) ++s.edges[static_cast<int>(e.kind)];
        return s;
    }

    const std::map<NodeId, CanonicalNode>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<NodeId> type_of_product(NodeId product) const {
        auto it = of_type_.find(product);
        if (it == of_type_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<NodeId> key_of_value(NodeId value) const {
        auto it = value_parent_.find(value);
        if (it == value_parent_.end()) return std::nullopt;
        return it->second;
    }

    /// Keys attached to a type, in the order they were attached.
    std::vector<NodeId> keys_of_type(NodeId type) const {
        auto it = keys_of_type_.find(type);
        if (it == keys_of_type_.end()) return {};
        return it->second;
    }

    std::vector<NodeId> values_of_key(NodeId key) const {
        auto it = values_of_key_.find(key);
        if (it == values_of_key_.end()) return {};
        return it->second;
    }

    std::vector<NodeId> attributes_of_product(NodeId product) const {
        auto it = attrs_of_product_.find(product);
        if (it == attrs_of_product_.end()) return {};
        return it->second;
    }

    // -- audit ----------------------------------------------------------------

    std::int64_t next_seq() const { return next_seq_; }

    /// Appends an audit record, assigning seq (and timestamp when unset).
    const AuditRecord& append_audit(AuditRecord rec) {
        rec.seq = next_seq_++;
        if (rec.timestamp == 0) rec.timestamp = rec.seq;
        audit_.push_back(std::move(rec));
        return audit_.back();
    }

    const std::vector<AuditRecord>& audit() const { return audit_; }

    // -- integrity ------------------------------------------------------------

    /// Re-derives every invariant from the primary node/edge data and reports
    /// violations as human-readable strings. Empty result means consistent.
    std::vector<std::string> validate() const {
        std::vector<std::string> out;
        std::map<std::pair<int, std::string>, NodeId> seen_labels;
        for (const auto& [id, n] : nodes_) {
            if (n.normalized_name.empty())
                out.push_back("node " + std::to_string(id) + " has an empty normalized name");
            std::vector<std::string> labels = n.normalized_synonyms;
            labels.push_back(n.normalized_name);
            for (const auto& lbl : labels) {
                auto key = std::make_pair(static_cast<int>(n.kind), lbl);
                auto [it, inserted] = seen_labels.emplace(key, id);
                if (!inserted && it->second != id)
                    out.push_back("label '" + lbl + "' claimed by nodes " +
                                  std::to_string(it->second) + " and " + std::to_string(id));
            }
        }
        std::set<std::tuple<NodeId, int, NodeId>> seen_edges;
        std::map<NodeId, NodeId> typing, parent;
        std::map<NodeId, std::set<NodeId>> type_keys;
        static constexpr NodeKind expect[kEdgeKindCount][2] = {
            {NodeKind::Product, NodeKind::ProductType},
            {NodeKind::ProductType, NodeKind::AttributeKey},
            {NodeKind::AttributeKey, NodeKind::Value},
            {NodeKind::Product, NodeKind::Value},
        };
        auto edge_str = [](const Edge& e) {
            return std::string(edge_kind_name(e.kind)) + "(" + std::to_string(e.src) + ", " +
                   std::to_string(e.dst) + ")";
        };
        for (const auto& e : edges_) {
            auto si = nodes_.find(e.src);
            auto di = nodes_.find(e.dst);
            if (si == nodes_.end() || di == nodes_.end()) {
                out.push_back(edge_str(e) + " references a missing node");
                continue;
            }
            int ek = static_cast<int>(e.kind);
            if (si->second.kind != expect[ek][0] || di->second.kind != expect[ek][1])
                out.push_back(edge_str(e) + " connects wrong node kinds");
            if (!seen_edges.insert({e.src, ek, e.dst}).second)
                out.push_back(edge_str(e) + " is duplicated");
            if (e.kind == EdgeKind::OfType) {
                auto [it, inserted] = typing.emplace(e.src, e.dst);
                if (!inserted && it->second != e.dst)
                    out.push_back("product " + std::to_string(e.src) + " has two types");
            } else if (e.kind == EdgeKind::HasValue) {
                auto [it, inserted] = parent.emplace(e.dst, e.src);
                if (!inserted && it->second != e.src)
                    out.push_back("value " + std::to_string(e.dst) + " has two key parents");
            } else if (e.kind == EdgeKind::HasKey) {
                type_keys[e.src].insert(e.dst);
            }
        }
        for (const auto& [id, n] : nodes_) {
            if (n.kind == NodeKind::Value && !parent.count(id))
                out.push_back("value " + std::to_string(id) + " has no key parent");
        }
        for (const auto& e : edges_) {
            if (e.kind != EdgeKind::HasAttribute) continue;
            auto tp = typing.find(e.src);
            auto kp = parent.find(e.dst);
            bool licensed = tp != typing.end() && kp != parent.end() &&
                            type_keys.count(tp->second) &&
                            type_keys.at(tp->second).count(kp->second);
            if (!licensed) out.push_back(edge_str(e) + " is not licensed by typing/key edges");
        }
        return out;
    }

    // -- serialization ----------------------------------------------------------

    ojson to_json() const {
        ojson j;
        j["meta"] = {{"format_version", kSnapshotFormatVersion},
                     {"next_id", next_id_},
                     {"next_seq", next_seq_}};
        j["nodes"] = ojson::array();
        for (const auto& [id, n] : nodes_) {
            ojson jn;
            jn["id"] = id;
            jn["kind"] = node_kind_name(n.kind);
            jn["name"] = n.name;
            if (n.description)
                jn["description"] = *n.description;
            else
                jn["description"] = nullptr;
            jn["synonyms"] = n.synonyms;
            jn["created_at"] = n.created_at;
            j["nodes"].push_back(std::move(jn));
        }
        j["edges"] = ojson::array();
        for (const auto& e : edges_)
            j["edges"].push_back({{"src", e.src}, {"kind", edge_kind_name(e.kind)}, {"dst", e.dst}});
        j["audit"] = ojson::array();
        for (const auto& r : audit_) {
            ojson jr;
            jr["seq"] = r.seq;
            jr["kind"] = node_kind_name(r.kind);
            jr["candidate"] = r.candidate;
            if (r.candidate_description)
                jr["candidate_description"] = *r.candidate_description;
            else
                jr["candidate_description"] = nullptr;
            jr["action"] = r.action;
            if (r.target)
                jr["target"] = *r.target;
            else
                jr["target"] = nullptr;
            jr["backend"] = r.backend;
            jr["timestamp"] = r.timestamp;
            jr["note"] = r.note;
            j["audit"].push_back(std::move(jr));
        }
        return j;
    }

    std::string serialize() const { return to_json().dump(2) + "\n"; }

    static Graph from_json(const ojson& j) {
        Graph g;
        try {
            if (!j.is_object() || !j.contains("meta") || !j.contains("nodes") ||
                !j.contains("edges"))
                raise(Errc::ParseError, "snapshot is missing meta/nodes/edges");
            const auto& meta = j.at("meta");
            int version = meta.at("format_version").get<int>();
            if (version != kSnapshotFormatVersion)
                raise(Errc::ParseError,
                      "unsupported snapshot format_version " + std::to_string(version));
            for (const auto& jn : j.at("nodes")) {
                CanonicalNode n;
                n.id = jn.at("id").get<NodeId>();
                auto kind = node_kind_from_name(jn.at("kind").get<std::string>());
                if (!kind)
                    raise(Errc::ParseError,
                          "unknown node kind '" + jn.at("kind").get<std::string>() + "'");
                n.kind = *kind;
                n.name = jn.at("name").get<std::string>();
                n.normalized_name = normalize(n.name);
                if (n.normalized_name.empty())
                    raise(Errc::ParseError, "node " + std::to_string(n.id) + " has an empty name");
                if (jn.contains("description") && !jn.at("description").is_null())
                    n.description = jn.at("description").get<std::string>();
                for (const auto& js : jn.at("synonyms")) {
                    n.synonyms.push_back(js.get<std::string>());
                    n.normalized_synonyms.push_back(normalize(n.synonyms.back()));
                }
                n.created_at = jn.at("created_at").get<std::int64_t>();
                g.insert_loaded_node(std::move(n));
            }
            for (const auto& je : j.at("edges")) {
                auto kind = edge_kind_from_name(je.at("kind").get<std::string>());
                if (!kind)
                    raise(Errc::ParseError,
                          "unknown edge kind '" + je.at("kind").get<std::string>() + "'");
                g.add_edge(je.at("src").get<NodeId>(), *kind, je.at("dst").get<NodeId>());
            }
            if (j.contains("audit")) {
                for (const auto& jr : j.at("audit")) {
                    AuditRecord r;
                    r.seq = jr.at("seq").get<std::int64_t>();
                    auto kind = node_kind_from_name(jr.at("kind").get<std::string>());
                    if (!kind)
                        raise(Errc::ParseError, "audit record has unknown kind");
                    r.kind = *kind;
                    r.candidate = jr.at("candidate").get<std::string>();
                    if (jr.contains("candidate_description") &&
                        !jr.at("candidate_description").is_null())
                        r.candidate_description =
                            jr.at("candidate_description").get<std::string>();
                    r.action = jr.at("action").get<std::string>();
                    if (!jr.at("target").is_null()) r.target = jr.at("target").get<NodeId>();
                    r.backend = jr.at("backend").get<std::string>();
                    r.timestamp = jr.at("timestamp").get<std::int64_t>();
                    r.note = jr.at("note").get<std::string>();
                    g.audit_.push_back(std::move(r));
                }
            }
            g.next_id_ = meta.at("next_id").get<NodeId>();
            g.next_seq_ = meta.at("next_seq").get<std::int64_t>();
            for (const auto& [id, n] : g.nodes_) {
                if (id >= g.next_id_)
                    raise(Errc::ParseError, "node id " + std::to_string(id) +
                                                " exceeds meta.next_id");
                if (n.created_at >= g.next_created_) g.next_created_ = n.created_at + 1;
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            raise(Errc::ParseError, std::string("malformed snapshot: ") + ex.what());
        }
        return g;
    }

    static Graph deserialize(std::string_view text) {
        ojson j;
        try {
            j = ojson::parse(text);
        } catch (const nlohmann::json::parse_error& ex) {
            raise(Errc::ParseError,
                  "invalid JSON at byte " + std::to_string(ex.byte) + ": " + ex.what());
        }
        return from_json(j);
    }

    void save_file(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) raise(Errc::IoError, "cannot open '" + path + "' for writing");
        out << serialize();
        if (!out) raise(Errc::IoError, "failed writing '" + path + "'");
    }

    static Graph load_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(Errc::IoError, "cannot open '" + path + "' for reading");
        std::ostringstream buf;
        buf << in.rdbuf();
        return deserialize(buf.str());
    }

  private:
    CanonicalNode& mut(NodeId id) {
        auto it = nodes_.find(id);
        if (it == nodes_.end()) raise(Errc::UnknownNode, "no node with id " + std::to_string(id));
        return it->second;
    }

    void check_claim(NodeKind kind, const std::string& normalized, NodeId self, Errc code) const {
        const auto& claims = claims_[static_cast<int>(kind)];
        auto it = claims.find(normalized);
        if (it != claims.end() && it->second != self)
            raise(code, std::string(node_kind_name(kind)) + " label '" + normalized +
                            "' already belongs to node " + std::to_string(it->second));
    }

    void insert_loaded_node(CanonicalNode n) {
        if (nodes_.count(n.id))
            raise(Errc::ParseError, "duplicate node id " + std::to_string(n.id));
        auto& claims = claims_[static_cast<int>(n.kind)];
        check_claim(n.kind, n.normalized_name, n.id, Errc::ParseError);
        claims[n.normalized_name] = n.id;
        for (const auto& ns : n.normalized_synonyms) {
            check_claim(n.kind, ns, n.id, Errc::ParseError);
            claims[ns] = n.id;
        }
        NodeId id = n.id;
        nodes_.emplace(id, std::move(n));
    }

    std::map<NodeId, CanonicalNode> nodes_;
    std::map<std::string, NodeId> claims_[kNodeKindCount];
    std::vector<Edge> edges_;
    std::set<std::tuple<NodeId, int, NodeId>> edge_set_;
    std::map<NodeId, NodeId> of_type_;                  // product -> type
    std::map<NodeId, std::vector<NodeId>> keys_of_type_; // type -> keys, attach order
    std::map<NodeId, NodeId> value_parent_;             // value -> key
    std::map<NodeId, std::vector<NodeId>> values_of_key_;
    std::map<NodeId, std::vector<NodeId>> attrs_of_product_;
    std::vector<AuditRecord> audit_;
    NodeId next_id_ = 1;
    std::int64_t next_seq_ = 1;
    std::int64_t next_created_ = 1;
};

} // namespace autopkg
