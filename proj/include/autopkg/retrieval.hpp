#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "autopkg/embedding.hpp"
#include "autopkg/graph.hpp"

namespace autopkg {

struct ScoredNeighbor {
    NodeId id = 0;
    double score = 0.0;
    int rank = 0; // 1-based
};

/// Per-kind dense index over node-name embeddings. Brute-force scan: graphs
/// stay small enough that exactness beats ANN bookkeeping, and a full scan in
/// id order keeps results deterministic.
class RetrievalIndex {
  public:
    explicit RetrievalIndex(Embedder& embedder) : embedder_(&embedder) {}

    /// (Re-)embeds the node's current name and stores it. Call after any
    /// committed insert or rename.
    void upsert(const Graph& g, NodeId id) {
        const CanonicalNode& n = g.node(id);
        vectors_[static_cast<int>(n.kind)][id] = embedder_->embed(n.normalized_name);
    }

    /// Rebuilds the whole index from a graph (used after loading a snapshot).
    void rebuild(const Graph& g) {
        for (auto& m : vectors_) m.clear();
        for (const auto& [id, n] : g.nodes())
            vectors_[static_cast<int>(n.kind)][id] = embedder_->embed(n.normalized_name);
    }

    size_t size(NodeKind kind) const { return vectors_[static_cast<int>(kind)].size(); }

    std::vector<float> embed_query(std::string_view text) const {
        return embedder_->embed(normalize(text));
    }

    /// Top-k cosine neighbors of `query` among nodes of `kind`, scored in
    /// descending order with ids breaking ties, ranks starting at 1.
    std::vector<ScoredNeighbor> query(NodeKind kind, const std::vector<float>& query,
                                      size_t k) const {
        std::vector<ScoredNeighbor> scored;
        const auto& m = vectors_[static_cast<int>(kind)];
        scored.reserve(m.size());
        for (const auto& [id, vec] : m) scored.push_back({id, cosine(query, vec), 0});
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        });
        if (scored.size() > k) scored.resize(k);
        for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
        return scored;
    }

    std::vector<ScoredNeighbor> query_text(NodeKind kind, std::string_view text, size_t k) const {
        return query(kind, embed_query(text), k);
    }

    Embedder& embedder() const { return *embedder_; }

  private:
    Embedder* embedder_;
    std::map<NodeId, std::vector<float>> vectors_[kNodeKindCount];
};

} // namespace autopkg
