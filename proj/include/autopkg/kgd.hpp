#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "autopkg/candidate.hpp"
#include "autopkg/graph.hpp"
#include "autopkg/prompts.hpp"
#include "autopkg/retrieval.hpp"

namespace autopkg {

/// Produces the raw decision text for a candidate ("MERGE 4587", "ADD", ...).
/// `attempt` is 0 on the first ask and 1 on the single retry, letting
/// remote backends re-sample. Implementations may throw Error; the gate
/// treats any throw as a failed attempt.
class DecisionBackend {
  public:
    virtual ~DecisionBackend() = default;
    virtual std::string propose(const Graph& g, const Candidate& cand,
                                const std::vector<ScoredNeighbor>& neighbors,
                                const std::string& prompt, Policy policy, int attempt) = 0;
    virtual std::string id() const = 0;
};

/// Parses a decision reply: first non-empty line, surrounding whitespace and
/// trailing punctuation tolerated, action word in uppercase. Merge/Replace
/// targets must be among the presented neighbors.
inline EditAction parse_action(std::string_view text, const std::vector<ScoredNeighbor>& neighbors) {
    std::string line;
    size_t begin = 0;
    while (begin <= text.size()) {
        size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(begin, end - begin);
        size_t a = raw.find_first_not_of(" \t\r");
        if (a != std::string_view::npos) {
            size_t b = raw.find_last_not_of(" \t\r");
            line = std::string(raw.substr(a, b - a + 1));
            break;
        }
        if (end == text.size()) break;
        begin = end + 1;
    }
    if (line.empty()) raise(Errc::UnparseableAction, "decision reply is empty");
    while (!line.empty() && (line.back() == '.' || line.back() == '!' || line.back() == ',' ||
                             line.back() == ';' || line.back() == ':'))
        line.pop_back();

    std::vector<std::string> tokens;
    std::string tok;
    for (char c : line) {
        if (c == ' ' || c == '\t') {
            if (!tok.empty()) tokens.push_back(std::move(tok)), tok.clear();
        } else {
            tok.push_back(c);
        }
    }
    if (!tok.empty()) tokens.push_back(std::move(tok));
    if (tokens.empty()) raise(Errc::UnparseableAction, "decision reply is empty");

    const std::string& word = tokens[0];
    if (word == "ADD" || word == "DISCARD") {
        if (tokens.size() != 1)
            raise(Errc::UnparseableAction, word + " takes no argument, got '" + line + "'");
        return {word == "ADD" ? ActionType::Add : ActionType::Discard, 0};
    }
    if (word == "MERGE" || word == "REPLACE") {
        if (tokens.size() != 2)
            raise(Errc::UnparseableAction, word + " needs exactly one node_id, got '" + line + "'");
        const std::string& arg = tokens[1];
        if (arg.empty() || !std::all_of(arg.begin(), arg.end(),
                                        [](unsigned char c) { return std::isdigit(c); }))
            raise(Errc::UnparseableAction, "'" + arg + "' is not a node_id");
        NodeId target = 0;
        try {
            target = std::stoll(arg);
        } catch (const std::exception&) {
            raise(Errc::UnparseableAction, "'" + arg + "' is not a node_id");
        }
        bool known = std::any_of(neighbors.begin(), neighbors.end(),
                                 [&](const ScoredNeighbor& n) { return n.id == target; });
        if (!known)
            raise(Errc::UnknownTarget,
                  "node " + arg + " was not among the presented neighbors");
        return {word == "MERGE" ? ActionType::Merge : ActionType::Replace, target};
    }
    raise(Errc::UnparseableAction, "unrecognized action in '" + line + "'");
}

inline void check_policy_legal(const EditAction& a, Policy p) {
    if (p == Policy::NoDiscard && a.type == ActionType::Discard)
        raise(Errc::IllegalAction, "DISCARD is not available under the no-discard policy");
}

inline const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {"none", "null", "n/a", "unknown", "misc", "other"};
    return words;
}

/// Deterministic decision policy: no model, just string identity rules plus a
/// cosine threshold. Emits the same reply format a model would, so the whole
/// parse/apply path is identical either way.
///
/// Basic: junk guard -> merge on plural-insensitive label equality -> merge on
/// top-1 cosine >= theta -> add. Strict: only exact label/synonym equality
/// merges (morphological variants stay separate). NoDiscard: junk maps to add.
class RuleBackend final : public DecisionBackend {
  public:
    explicit RuleBackend(double theta_merge = 0.92,
                         std::set<std::string> stopwords = default_stopwords())
        : theta_(theta_merge), stopwords_(std::move(stopwords)) {}

    std::string propose(const Graph& g, const Candidate& cand,
                        const std::vector<ScoredNeighbor>& neighbors, const std::string&,
                        Policy policy, int) override {
        std::string norm = normalize(cand.name);
        bool junk = codepoint_count(norm) < 2 || stopwords_.count(norm) > 0;
        if (junk) return policy == Policy::NoDiscard ? "ADD" : "DISCARD";
        for (const auto& h : neighbors) {
            const CanonicalNode& n = g.node(h.id);
            if (label_match(n, norm, policy)) return "MERGE " + std::to_string(h.id);
        }
        if (policy != Policy::Strict && !neighbors.empty() && neighbors.front().score >= theta_)
            return "MERGE " + std::to_string(neighbors.front().id);
        return "ADD";
    }

    std::string id() const override { return "rule"; }

    double theta() const { return theta_; }

  private:
    static bool label_match(const CanonicalNode& n, const std::string& norm, Policy policy) {
        if (policy == Policy::Strict) {
            if (n.normalized_name == norm) return true;
            return std::find(n.normalized_synonyms.begin(), n.normalized_synonyms.end(), norm) !=
                   n.normalized_synonyms.end();
        }
        if (plural_equal(n.normalized_name, norm)) return true;
        return std::any_of(n.normalized_synonyms.begin(), n.normalized_synonyms.end(),
                           [&](const std::string& s) { return plural_equal(s, norm); });
    }

    double theta_;
    std::set<std::string> stopwords_;
};

struct KgdOptions {
    Policy policy = Policy::Basic;
    size_t k = 10;
    bool retrieval_context = true; // false disables the neighborhood (ablation)
};

struct ApplyOutcome {
    EditAction action{};   // the action actually applied (after any degrade)
    NodeId node = 0;       // resolved node; 0 when discarded
    bool degraded = false; // decision or apply had to fall back
    std::int64_t audit_seq = 0;
    std::string note;
};

/// The consolidation gate. Sole owner of graph writes: every candidate goes
/// retrieve -> decide -> apply here, leaves exactly one audit record, and can
/// never leave the graph in an invalid state (failed applies roll back and
/// degrade to a recorded discard).
class Kgd {
  public:
    Kgd(Graph& graph, RetrievalIndex& index, DecisionBackend& backend, KgdOptions opts = {})
        : graph_(&graph), index_(&index), backend_(&backend), opts_(opts) {}

    const KgdOptions& options() const { return opts_; }
    Graph& graph() { return *graph_; }
    RetrievalIndex& index() { return *index_; }

    std::vector<ScoredNeighbor> retrieve(const Candidate& cand) const {
        if (!opts_.retrieval_context) return {};
        return index_->query_text(cand.kind, cand.name, opts_.k);
    }

    ApplyOutcome submit(const Candidate& cand) {
        if (normalize(cand.name).empty())
            return finish(cand, {ActionType::Discard, 0}, {}, "gate",
                          "candidate name empty after normalization; ", true);
        if (cand.kind == NodeKind::Product)
            return finish(cand, {ActionType::Add, 0}, {}, "product-bypass", "", false);

        std::vector<ScoredNeighbor> neighbors = retrieve(cand);
        std::string prompt = prompts::render_kgd(opts_.policy, *graph_, cand, neighbors);
        std::string note;
        for (int attempt = 0; attempt < 2; ++attempt) {
            try {
                std::string reply =
                    backend_->propose(*graph_, cand, neighbors, prompt, opts_.policy, attempt);
                EditAction action = parse_action(reply, neighbors);
                check_policy_legal(action, opts_.policy);
                return finish(cand, action, neighbors, backend_->id(), note, false);
            } catch (const Error& e) {
                note += std::string(attempt == 0 ? "attempt 1: " : "attempt 2: ") + e.what() + "; ";
            } catch (const std::exception& e) {
                note += std::string(attempt == 0 ? "attempt 1: " : "attempt 2: ") + e.what() + "; ";
            }
        }
        EditAction fallback{opts_.policy == Policy::NoDiscard ? ActionType::Add
                                                              : ActionType::Discard,
                            0};
        note += std::string("degraded to ") + action_name(fallback.type) + " after retry; ";
        return finish(cand, fallback, neighbors, backend_->id(), note, true);
    }

  private:
    /// Applies the action transactionally, then writes the one audit record.
    ApplyOutcome finish(const Candidate& cand, EditAction action,
                        const std::vector<ScoredNeighbor>& neighbors,
                        const std::string& backend_id, std::string note, bool degraded) {
        (void)neighbors;
        ApplyOutcome out;
        switch (action.type) {
            case ActionType::Add: {
                Graph backup = *graph_;
                try {
                    NodeId id = graph_->add_node(cand.kind, cand.name, cand.description);
                    attach_edges(id, cand, note, /*strict=*/true);
                    out.node = id;
                    index_->upsert(*graph_, id);
                } catch (const Error& e) {
                    *graph_ = backup;
                    note += std::string("add rolled back: ") + e.what() + "; ";
                    action = {ActionType::Discard, 0};
                    degraded = true;
                    out.node = 0;
                }
                break;
            }
            case ActionType::Merge: {
                try {
                    graph_->add_synonym(action.target, cand.name);
                } catch (const Error& e) {
                    note += std::string("synonym skipped: ") + e.what() + "; ";
                }
                attach_edges(action.target, cand, note, /*strict=*/false);
                out.node = action.target;
                break;
            }
            case ActionType::Replace: {
                NodeId resolved = action.target;
                try {
                    graph_->replace_label(action.target, cand.name);
                    index_->upsert(*graph_, action.target);
                } catch (const Error& e) {
                    auto third = graph_->find(cand.kind, cand.name);
                    if (third && *third != action.target) {
                        note += "replacement label already owned by node " +
                                std::to_string(*third) + "; merged there instead; ";
                        action = {ActionType::Merge, *third};
                        resolved = *third;
                    } else {
                        note += std::string("replace rolled back: ") + e.what() + "; ";
                        action = {ActionType::Discard, 0};
                        degraded = true;
                        resolved = 0;
                    }
                }
                if (action.type != ActionType::Discard)
                    attach_edges(resolved, cand, note, /*strict=*/false);
                out.node = resolved;
                break;
            }
            case ActionType::Discard:
                out.node = 0;
                break;
        }

        AuditRecord rec;
        rec.kind = cand.kind;
        rec.candidate = cand.name;
        rec.candidate_description = cand.description;
        rec.action = action_name(action.type);
        if (action.type == ActionType::Merge || action.type == ActionType::Replace)
            rec.target = action.target;
        else if (action.type == ActionType::Add && out.node != 0)
            rec.target = out.node;
        rec.backend = backend_id;
        rec.note = note;
        out.audit_seq = graph_->append_audit(std::move(rec)).seq;
        out.action = action;
        out.degraded = degraded;
        out.note = std::move(note);
        return out;
    }

    /// Materializes the candidate's intended edges against `self`. In strict
    /// mode (fresh Add) violations throw so the caller can roll back; in merge
    /// mode violations are skipped and recorded — the canonical node already
    /// carries its own obligations and a conflicting duplicate assertion must
    /// not unwind the merge.
    void attach_edges(NodeId self, const Candidate& cand, std::string& note, bool strict) {
        for (const IntendedEdge& e : cand.intended_edges) {
            NodeId src = e.self_is_src ? self : e.other;
            NodeId dst = e.self_is_src ? e.other : self;
            if (strict) {
                graph_->add_edge(src, e.kind, dst);
                continue;
            }
            try {
                graph_->add_edge(src, e.kind, dst);
            } catch (const Error& ex) {
                note += std::string("edge skipped: ") + ex.what() + "; ";
            }
        }
    }

    Graph* graph_;
    RetrievalIndex* index_;
    DecisionBackend* backend_;
    KgdOptions opts_;
};

} // namespace autopkg
