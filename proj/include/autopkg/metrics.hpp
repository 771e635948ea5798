#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "autopkg/core.hpp"
#include "autopkg/error.hpp"

namespace autopkg {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Aggregate quality scores
// ---------------------------------------------------------------------------

/// Weighted harmonic mean of three rates. Heavily weights the first component
/// (default 3:1:1) so that over-aggressive consolidation cannot buy a high
/// score by sacrificing validity. Any zero component collapses the whole
/// score to 0 (the continuous limit of the harmonic mean).
inline double wke(double c1, double c2, double c3, double w1 = 3.0, double w2 = 1.0,
                  double w3 = 1.0) {
    for (double c : {c1, c2, c3})
        if (!(c >= 0.0 && c <= 1.0))
            raise(Errc::DomainError, "wke component " + std::to_string(c) + " outside [0, 1]");
    for (double w : {w1, w2, w3})
        if (!(w > 0.0)) raise(Errc::DomainError, "wke weights must be positive");
    if (c1 == 0.0 || c2 == 0.0 || c3 == 0.0) return 0.0;
    return (w1 + w2 + w3) / (w1 / c1 + w2 / c2 + w3 / c3);
}

/// Redundancy removed by canonicalization: 1 - canonical/raw.
inline double compression(std::int64_t raw_count, std::int64_t canonical_count) {
    if (raw_count <= 0) raise(Errc::DomainError, "compression needs a positive raw count");
    if (canonical_count < 0 || canonical_count > raw_count)
        raise(Errc::DomainError, "canonical count " + std::to_string(canonical_count) +
                                     " outside [0, " + std::to_string(raw_count) + "]");
    return 1.0 - static_cast<double>(canonical_count) / static_cast<double>(raw_count);
}

// ---------------------------------------------------------------------------
// Probabilistic key-set scoring (no exhaustive ground truth available: pooled
// predictions weighted by per-model reliability priors)
// ---------------------------------------------------------------------------

/// Noisy-OR membership probability: a key someone predicted is in the ground
/// truth unless every one of its predictors is independently wrong.
inline double noisy_or_gt_prob(const std::vector<double>& priors) {
    if (priors.empty()) raise(Errc::EmptyInput, "noisy-or needs at least one prior");
    double miss = 1.0;
    for (double p : priors) {
        if (!(p >= 0.0 && p <= 1.0))
            raise(Errc::DomainError, "prior " + std::to_string(p) + " outside [0, 1]");
        miss *= 1.0 - p;
    }
    return 1.0 - miss;
}

struct ProbKeyScore {
    double tp = 0.0;     // expected true positives
    double p_prec = 0.0; // tp / |own keys|
    double p_rec = 0.0;  // tp / |expected GT|
    size_t key_count = 0;
};

struct ProbKeyReport {
    double gt_hat = 0.0; // expected ground-truth size over the pooled keys
    size_t pooled_keys = 0;
    std::map<std::string, ProbKeyScore> per_model;
};

/// Scores each model's canonical key set against the pooled expectation.
/// Keys are compared verbatim — canonicalize before calling.
inline ProbKeyReport prob_precision_recall(
    const std::map<std::string, std::set<std::string>>& model_keysets,
    const std::map<std::string, double>& priors) {
    for (const auto& [model, keys] : model_keysets)
        if (!priors.count(model))
            raise(Errc::MissingPrior, "no reliability prior for model '" + model + "'");

    // P(key in GT) for every pooled key.
    std::map<std::string, double> key_prob;
    std::set<std::string> pooled;
    for (const auto& [model, keys] : model_keysets) pooled.insert(keys.begin(), keys.end());
    for (const auto& key : pooled) {
        std::vector<double> ps;
        for (const auto& [model, keys] : model_keysets)
            if (keys.count(key)) ps.push_back(priors.at(model));
        key_prob[key] = noisy_or_gt_prob(ps);
    }

    ProbKeyReport rep;
    rep.pooled_keys = pooled.size();
    for (const auto& [key, p] : key_prob) rep.gt_hat += p;
    for (const auto& [model, keys] : model_keysets) {
        ProbKeyScore s;
        s.key_count = keys.size();
        for (const auto& key : keys) s.tp += key_prob.at(key);
        s.p_prec = keys.empty() ? 0.0 : s.tp / static_cast<double>(keys.size());
        s.p_rec = rep.gt_hat > 0.0 ? s.tp / rep.gt_hat : 0.0;
        rep.per_model[model] = s;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Edge-level precision/recall/F1 against a reference graph
// ---------------------------------------------------------------------------

/// Per-product (key, value) fact sets, already canonicalized upstream.
struct EdgeSet {
    std::map<std::string, std::set<std::pair<std::string, std::string>>> products;
};

inline EdgeSet load_edgeset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open edge set '" + path + "'");
    EdgeSet es;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ojson j;
        try {
            j = ojson::parse(line);
            std::string pid = j.at("product_id").get<std::string>();
            auto& pairs = es.products[pid];
            for (const auto& pr : j.at("pairs")) {
                if (!pr.is_array() || pr.size() != 2)
                    raise(Errc::ParseError, "pair is not a [key, value] array");
                pairs.emplace(pr.at(0).get<std::string>(), pr.at(1).get<std::string>());
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            raise(Errc::ParseError,
                  path + ":" + std::to_string(lineno) + ": malformed edge set line: " + ex.what());
        }
    }
    return es;
}

inline void save_edgeset(const std::string& path, const EdgeSet& es) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot open '" + path + "' for writing");
    for (const auto& [pid, pairs] : es.products) {
        ojson j;
        j["product_id"] = pid;
        j["pairs"] = ojson::array();
        for (const auto& [k, v] : pairs) j["pairs"].push_back({k, v});
        out << j.dump() << "\n";
    }
    if (!out) raise(Errc::IoError, "failed writing '" + path + "'");
}

struct PrfRow {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EdgePrfReport {
    PrfRow keys;
    PrfRow values;
    size_t products_compared = 0; // intersection of predicted and reference ids
};

namespace detail {

inline double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

} // namespace detail

/// Key facts match on normalized names; value facts additionally require the
/// reference value to contain the predicted value as a substring (normalized).
/// Per product: both sides empty scores 1/1, an empty side against a nonempty
/// one scores 0. Macro averages run over the id intersection only, and F1 is
/// computed from the macro precision/recall.
inline EdgePrfReport edge_prf(const EdgeSet& predicted, const EdgeSet& reference) {
    EdgePrfReport rep;
    double sum_pk = 0, sum_rk = 0, sum_pv = 0, sum_rv = 0;
    for (const auto& [pid, raw_pred] : predicted.products) {
        auto ref_it = reference.products.find(pid);
        if (ref_it == reference.products.end()) continue;
        ++rep.products_compared;

        std::set<std::string> pred_keys, ref_keys;
        std::set<std::pair<std::string, std::string>> pred_pairs, ref_pairs;
        for (const auto& [k, v] : raw_pred) {
            pred_keys.insert(normalize(k));
            pred_pairs.emplace(normalize(k), normalize(v));
        }
        for (const auto& [k, v] : ref_it->second) {
            ref_keys.insert(normalize(k));
            ref_pairs.emplace(normalize(k), normalize(v));
        }

        size_t key_tp = 0;
        for (const auto& k : pred_keys) key_tp += ref_keys.count(k);
        if (pred_keys.empty() && ref_keys.empty()) {
            sum_pk += 1.0;
            sum_rk += 1.0;
        } else {
            sum_pk += pred_keys.empty() ? 0.0
                                        : static_cast<double>(key_tp) /
                                              static_cast<double>(pred_keys.size());
            sum_rk += ref_keys.empty() ? 0.0
                                       : static_cast<double>(key_tp) /
                                             static_cast<double>(ref_keys.size());
        }

        size_t val_tp = 0;
        for (const auto& [k, v] : pred_pairs) {
            for (const auto& [rk, rv] : ref_pairs) {
                if (rk == k && rv.find(v) != std::string::npos) {
                    ++val_tp;
                    break;
                }
            }
        }
        if (pred_pairs.empty() && ref_pairs.empty()) {
            sum_pv += 1.0;
            sum_rv += 1.0;
        } else {
            sum_pv += pred_pairs.empty() ? 0.0
                                         : static_cast<double>(val_tp) /
                                               static_cast<double>(pred_pairs.size());
            sum_rv += ref_pairs.empty() ? 0.0
                                        : static_cast<double>(val_tp) /
                                              static_cast<double>(ref_pairs.size());
        }
    }
    if (rep.products_compared == 0) return rep;
    double n = static_cast<double>(rep.products_compared);
    rep.keys.precision = sum_pk / n;
    rep.keys.recall = sum_rk / n;
    rep.keys.f1 = detail::f1_of(rep.keys.precision, rep.keys.recall);
    rep.values.precision = sum_pv / n;
    rep.values.recall = sum_rv / n;
    rep.values.f1 = detail::f1_of(rep.values.precision, rep.values.recall);
    return rep;
}

// ---------------------------------------------------------------------------
// Judge agreement
// ---------------------------------------------------------------------------

inline double cohen_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size())
        raise(Errc::LengthMismatch, "label vectors differ in length: " + std::to_string(a.size()) +
                                        " vs " + std::to_string(b.size()));
    if (a.empty()) raise(Errc::EmptyInput, "label vectors are empty");
    double n = static_cast<double>(a.size());
    size_t agree = 0;
    std::map<std::string, size_t> fa, fb;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agree;
        ++fa[a[i]];
        ++fb[b[i]];
    }
    double p_o = static_cast<double>(agree) / n;
    double p_e = 0.0;
    for (const auto& [label, ca] : fa) {
        auto it = fb.find(label);
        if (it != fb.end())
            p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
    if (p_e >= 1.0) return 1.0; // both raters constant and identical
    return (p_o - p_e) / (1.0 - p_e);
}

/// Majority vote across judges; instances without a label reaching the
/// threshold (including ties at the threshold) come back as nullopt (abstain).
inline std::vector<std::optional<std::string>> majority_consensus(
    const std::vector<std::vector<std::string>>& judges, size_t threshold = 3) {
    if (judges.empty()) raise(Errc::EmptyInput, "no judges given");
    if (threshold < 1) raise(Errc::DomainError, "threshold must be >= 1");
    if (judges.size() < threshold)
        raise(Errc::DomainError, "only " + std::to_string(judges.size()) + " judges for a " +
                                     std::to_string(threshold) + "-vote threshold");
    size_t n = judges.front().size();
    for (const auto& j : judges)
        if (j.size() != n) raise(Errc::LengthMismatch, "judge label vectors differ in length");

    std::vector<std::optional<std::string>> out(n);
    for (size_t i = 0; i < n; ++i) {
        std::map<std::string, size_t> votes;
        for (const auto& j : judges) ++votes[j[i]];
        std::optional<std::string> winner;
        bool tie = false;
        for (const auto& [label, count] : votes) {
            if (count < threshold) continue;
            if (winner)
                tie = true;
            else
                winner = label;
        }
        if (!tie) out[i] = winner;
    }
    return out;
}

/// Fraction of consensus-labeled instances the candidate matches; abstained
/// instances are excluded from the denominator.
inline double accuracy_vs_consensus(const std::vector<std::string>& candidate,
                                    const std::vector<std::optional<std::string>>& consensus) {
    if (candidate.size() != consensus.size())
        raise(Errc::LengthMismatch, "candidate and consensus differ in length");
    size_t considered = 0, matched = 0;
    for (size_t i = 0; i < candidate.size(); ++i) {
        if (!consensus[i]) continue;
        ++considered;
        if (candidate[i] == *consensus[i]) ++matched;
    }
    return considered == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(considered);
}

} // namespace autopkg
