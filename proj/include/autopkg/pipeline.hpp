#pragma once

#include <algorithm>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "autopkg/chat.hpp"
#include "autopkg/kgd.hpp"
#include "autopkg/listing.hpp"
#include "autopkg/parsers.hpp"
#include "autopkg/prompts.hpp"

namespace autopkg {

// ---------------------------------------------------------------------------
// Extraction agents. Each returns the model's raw reply; the pipeline owns
// parsing and retries, so scripted offline agents exercise the same parsers
// as remote models.
// ---------------------------------------------------------------------------

class TypeAgent {
  public:
    virtual ~TypeAgent() = default;
    virtual std::string suggest(const Listing& l, const std::string& prompt, int attempt) = 0;
    virtual std::string id() const = 0;
};

class KeyAgent {
  public:
    virtual ~KeyAgent() = default;
    virtual std::string discover(const std::string& type_name, const std::string& type_description,
                                 const std::string& prompt, int attempt) = 0;
    virtual std::string id() const = 0;
};

class ValueAgent {
  public:
    virtual ~ValueAgent() = default;
    virtual std::string extract(const Listing& l, const KeyTable& table,
                                const std::string& prompt,
                                const std::vector<std::string>& images, int attempt) = 0;
    virtual std::string id() const = 0;
};

// Remote (chat-completion) implementations.

class LlmTypeAgent final : public TypeAgent {
  public:
    LlmTypeAgent(ChatClient client, GenerationParams params = {})
        : client_(std::move(client)), params_(params) {}
    std::string suggest(const Listing&, const std::string& prompt, int) override {
        return client_.chat(prompt, {}, params_);
    }
    std::string id() const override { return "llm:" + client_.model(); }

  private:
    ChatClient client_;
    GenerationParams params_;
};

class LlmKeyAgent final : public KeyAgent {
  public:
    LlmKeyAgent(ChatClient client, GenerationParams params = {})
        : client_(std::move(client)), params_(params) {}
    std::string discover(const std::string&, const std::string&, const std::string& prompt,
                         int) override {
        return client_.chat(prompt, {}, params_);
    }
    std::string id() const override { return "llm:" + client_.model(); }

  private:
    ChatClient client_;
    GenerationParams params_;
};

class LlmValueAgent final : public ValueAgent {
  public:
    LlmValueAgent(ChatClient client, GenerationParams params = {})
        : client_(std::move(client)), params_(params) {}
    std::string extract(const Listing&, const KeyTable&, const std::string& prompt,
                        const std::vector<std::string>& images, int) override {
        return client_.chat(prompt, images, params_);
    }
    std::string id() const override { return "llm:" + client_.model(); }

  private:
    ChatClient client_;
    GenerationParams params_;
};

/// Remote decision backend for the consolidation gate.
class LlmDecisionBackend final : public DecisionBackend {
  public:
    LlmDecisionBackend(ChatClient client, GenerationParams params = {})
        : client_(std::move(client)), params_(params) {}
    std::string propose(const Graph&, const Candidate&, const std::vector<ScoredNeighbor>&,
                        const std::string& prompt, Policy, int) override {
        return client_.chat(prompt, {}, params_);
    }
    std::string id() const override { return "llm:" + client_.model(); }

  private:
    ChatClient client_;
    GenerationParams params_;
};

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

struct PipelineConfig {
    bool use_images = true;
    int workers = 4; // concurrent type-suggestion prefetches
    bool rediscover_keys = false; // also run key discovery when a type merged
};

struct ListingReport {
    std::string listing_id;
    std::optional<NodeId> type_node; // unset when unassigned
    bool abstained = false;          // model answered None (or reply unusable)
    bool type_discarded = false;     // gate rejected the proposed type
    size_t proposed = 0;
    size_t added = 0;
    size_t merged = 0;
    size_t replaced = 0;
    size_t discarded = 0;
    std::vector<std::string> warnings;
};

struct PipelineReport {
    size_t listings = 0;
    size_t assigned = 0;
    size_t abstained = 0;
    size_t proposed = 0;
    size_t added = 0;
    size_t merged = 0;
    size_t replaced = 0;
    size_t discarded = 0;
    size_t key_discovery_calls = 0;
    std::vector<ListingReport> per_listing;
};

class Pipeline {
  public:
    Pipeline(Kgd& kgd, TypeAgent& type_agent, KeyAgent& key_agent, ValueAgent& value_agent,
             PipelineConfig config = {})
        : kgd_(&kgd), type_agent_(&type_agent), key_agent_(&key_agent),
          value_agent_(&value_agent), config_(config) {}

    const std::map<NodeId, std::vector<std::string>>& key_examples() const {
        return examples_of_key_;
    }

    /// The type's current attribute schema as stored in the graph, rows in
    /// HasKey attach order, Brand hoisted to the front when present.
    KeyTable key_table_for(NodeId type_node) const {
        const Graph& g = kgd_->graph();
        KeyTable table;
        table.product_type = type_node;
        for (NodeId key : g.keys_of_type(type_node)) {
            const CanonicalNode& n = g.node(key);
            KeyTableRow row;
            row.key_id = key;
            row.name = n.name;
            row.description = n.description.value_or("");
            auto ex = examples_of_key_.find(key);
            if (ex != examples_of_key_.end()) row.examples = ex->second;
            table.rows.push_back(std::move(row));
        }
        for (size_t i = 0; i < table.rows.size(); ++i) {
            if (normalize(table.rows[i].name) == "brand") {
                if (i > 0) std::rotate(table.rows.begin(), table.rows.begin() + i,
                                       table.rows.begin() + i + 1);
                break;
            }
        }
        return table;
    }

    ListingReport process_listing(const Listing& listing,
                                  std::optional<std::string> prefetched_type_reply = {}) {
        ListingReport rep;
        rep.listing_id = listing.id;

        // 1. Type induction.
        std::optional<std::string> type_name = induce_type(listing, prefetched_type_reply, rep);
        if (!type_name) {
            rep.abstained = true;
            return rep;
        }

        Candidate type_cand = make_type_candidate(
            *type_name, synth_type_description(listing, *type_name), "type-agent:" + listing.id);
        ApplyOutcome type_out = submit_counted(type_cand, rep);
        if (type_out.action.type == ActionType::Discard) {
            rep.type_discarded = true;
            return rep;
        }
        NodeId type_node = type_out.node;
        rep.type_node = type_node;

        // 2. Key discovery, only when the type is brand new (merged/replaced
        // types already carry a schema; retrieval hands it back below).
        if (type_out.action.type == ActionType::Add || config_.rediscover_keys)
            discover_keys(type_node, rep);

        // 3. Product node (identity, bypasses dedup).
        ApplyOutcome product_out =
            submit_counted(make_product_candidate(listing.id, listing.title, type_node), rep);
        if (product_out.action.type != ActionType::Add) {
            rep.warnings.push_back("product node rejected: " + product_out.note);
            return rep;
        }
        NodeId product_node = product_out.node;

        // 4. Value extraction against the type's current schema.
        KeyTable table = key_table_for(type_node);
        if (table.rows.empty()) {
            rep.warnings.push_back("type has an empty key table; no extraction attempted");
            return rep;
        }
        extract_values(listing, table, product_node, type_node, rep);
        return rep;
    }

    PipelineReport run(const std::vector<Listing>& corpus) {
        PipelineReport rep;
        size_t window = config_.workers > 1 ? static_cast<size_t>(config_.workers) : 1;
        for (size_t base = 0; base < corpus.size(); base += window) {
            size_t end = std::min(corpus.size(), base + window);
            // Prefetch first-attempt type replies concurrently; everything
            // downstream stays strictly in listing order.
            std::vector<std::optional<std::string>> replies(end - base);
            if (window > 1) {
                std::vector<std::future<std::string>> futures;
                futures.reserve(end - base);
                for (size_t i = base; i < end; ++i)
                    futures.push_back(std::async(std::launch::async, [this, &corpus, i] {
                        return type_agent_->suggest(
                            corpus[i], prompts::render_type_suggestion(corpus[i]), 0);
                    }));
                for (size_t i = 0; i < futures.size(); ++i) {
                    try {
                        replies[i] = futures[i].get();
                    } catch (const std::exception&) {
                        replies[i] = std::nullopt; // retried serially in-process
                    }
                }
            }
            for (size_t i = base; i < end; ++i)
                accumulate(rep, process_listing(corpus[i], replies[i - base]));
        }
        return rep;
    }

    static ojson report_to_json(const PipelineReport& rep) {
        ojson j;
        j["listings"] = rep.listings;
        j["assigned"] = rep.assigned;
        j["abstained"] = rep.abstained;
        j["candidates"] = {{"proposed", rep.proposed}, {"added", rep.added},
                           {"merged", rep.merged},     {"replaced", rep.replaced},
                           {"discarded", rep.discarded}};
        j["key_discovery_calls"] = rep.key_discovery_calls;
        j["per_listing"] = ojson::array();
        for (const auto& lr : rep.per_listing) {
            ojson jl;
            jl["id"] = lr.listing_id;
            if (lr.type_node)
                jl["type_node"] = *lr.type_node;
            else
                jl["type_node"] = nullptr;
            jl["abstained"] = lr.abstained;
            jl["type_discarded"] = lr.type_discarded;
            jl["proposed"] = lr.proposed;
            jl["added"] = lr.added;
            jl["merged"] = lr.merged;
            jl["replaced"] = lr.replaced;
            jl["discarded"] = lr.discarded;
            jl["warnings"] = lr.warnings;
            j["per_listing"].push_back(std::move(jl));
        }
        return j;
    }

  private:
    static std::string synth_type_description(const Listing& listing,
                                              const std::string& type_name) {
        std::string title = listing.title.substr(0, 120);
        return type_name + ": a product category induced from marketplace listings such as \"" +
               title + "\".";
    }

    std::optional<std::string> induce_type(const Listing& listing,
                                           std::optional<std::string>& prefetched,
                                           ListingReport& rep) {
        std::string prompt = prompts::render_type_suggestion(listing);
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::string reply;
            try {
                if (attempt == 0 && prefetched)
                    reply = *prefetched;
                else
                    reply = type_agent_->suggest(listing, prompt, attempt);
            } catch (const std::exception& ex) {
                rep.warnings.push_back(std::string("type agent failed: ") + ex.what());
                continue;
            }
            try {
                return parse_type_answer(reply); // nullopt = explicit abstention
            } catch (const Error& ex) {
                rep.warnings.push_back(std::string("type reply rejected: ") + ex.what());
            }
        }
        rep.warnings.push_back("type induction unusable after retry; listing unassigned");
        return std::nullopt;
    }

    void discover_keys(NodeId type_node, ListingReport& rep) {
        const Graph& g = kgd_->graph();
        const CanonicalNode& type = g.node(type_node);
        std::string prompt =
            prompts::render_key_discovery(type.name, type.description.value_or(""));
        ++key_discovery_calls_;
        std::vector<RawKeyRow> rows;
        bool parsed = false;
        for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
            try {
                std::string reply =
                    key_agent_->discover(type.name, type.description.value_or(""), prompt, attempt);
                rows = parse_key_table(reply, &rep.warnings);
                parsed = true;
            } catch (const std::exception& ex) {
                rep.warnings.push_back(std::string("key discovery attempt failed: ") + ex.what());
            }
        }
        if (!parsed) {
            rep.warnings.push_back("key discovery unusable after retry; empty table recorded");
            return;
        }
        for (const auto& row : rows) {
            Candidate cand = make_key_candidate(row.name, row.description, type_node,
                                                "key-agent:type-" + std::to_string(type_node));
            ApplyOutcome out = submit_counted(cand, rep);
            if (out.node != 0) {
                auto& ex = examples_of_key_[out.node];
                if (ex.empty()) ex = row.examples;
            }
        }
    }

    void extract_values(const Listing& listing, const KeyTable& table, NodeId product_node,
                        NodeId type_node, ListingReport& rep) {
        const Graph& g = kgd_->graph();
        const CanonicalNode& type = g.node(type_node);
        std::string prompt = prompts::render_value_extraction(
            type.name, type.description.value_or(""), table, listing);
        std::vector<std::string> images =
            config_.use_images ? listing.image_refs : std::vector<std::string>{};
        std::set<NodeId> valid_ids;
        for (const auto& row : table.rows) valid_ids.insert(row.key_id);

        std::vector<ValueEntry> entries;
        bool parsed = false;
        for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
            try {
                std::string reply =
                    value_agent_->extract(listing, table, prompt, images, attempt);
                entries = parse_value_json(reply, valid_ids, &rep.warnings);
                parsed = true;
            } catch (const std::exception& ex) {
                rep.warnings.push_back(std::string("value extraction attempt failed: ") +
                                       ex.what());
            }
        }
        if (!parsed) {
            rep.warnings.push_back("value extraction unusable after retry; no assertions");
            return;
        }
        for (const auto& entry : entries)
            for (const auto& value : entry.values)
                submit_counted(
                    make_value_candidate(value, entry.key_id, product_node,
                                         "value-agent:" + listing.id),
                    rep);
    }

    ApplyOutcome submit_counted(const Candidate& cand, ListingReport& rep) {
        ++rep.proposed;
        ApplyOutcome out = kgd_->submit(cand);
        switch (out.action.type) {
            case ActionType::Add: ++rep.added; break;
            case ActionType::Merge: ++rep.merged; break;
            case ActionType::Replace: ++rep.replaced; break;
            case ActionType::Discard: ++rep.discarded; break;
        }
        return out;
    }

    void accumulate(PipelineReport& total, ListingReport lr) {
        ++total.listings;
        if (lr.type_node) ++total.assigned;
        if (lr.abstained) ++total.abstained;
        total.proposed += lr.proposed;
        total.added += lr.added;
        total.merged += lr.merged;
        total.replaced += lr.replaced;
        total.discarded += lr.discarded;
        total.key_discovery_calls = key_discovery_calls_;
        total.per_listing.push_back(std::move(lr));
    }

    Kgd* kgd_;
    TypeAgent* type_agent_;
    KeyAgent* key_agent_;
    ValueAgent* value_agent_;
    PipelineConfig config_;
    std::map<NodeId, std::vector<std::string>> examples_of_key_;
    size_t key_discovery_calls_ = 0;
};

} // namespace autopkg
