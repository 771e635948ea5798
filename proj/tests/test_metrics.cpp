// Evaluation metrics. Fixed reference values are frozen here with pinned
// tolerances; the randomized sections check each scorer against an
// independently coded brute-force oracle.
#include <catch2/catch_amalgamated.hpp>

#include <autopkg/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace autopkg;

// ---------------------------------------------------------------------------
// Weighted harmonic quality score
// ---------------------------------------------------------------------------

TEST_CASE("weighted harmonic score reproduces the reference table") {
    constexpr double tol = 0.001;
    CHECK(wke(0.952, 0.948, 0.960) == Catch::Approx(0.953).margin(tol));
    CHECK(wke(0.936, 0.967, 0.986) == Catch::Approx(0.952).margin(tol));
    CHECK(wke(0.956, 0.990, 0.363) == Catch::Approx(0.724).margin(tol));
    CHECK(wke(0.794, 0.934, 0.474) == Catch::Approx(0.718).margin(tol));
}

TEST_CASE("weighted harmonic score properties") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> unit(0.001, 1.0);

    SECTION("equal components are a fixed point") {
        for (int i = 0; i < 100; ++i) {
            double c = unit(rng);
            CHECK(wke(c, c, c) == Catch::Approx(c).margin(1e-12));
        }
    }
    SECTION("bounded by min and max component") {
        for (int i = 0; i < 1000; ++i) {
            double a = unit(rng), b = unit(rng), c = unit(rng);
            double s = wke(a, b, c);
            CHECK(s >= std::min({a, b, c}) - 1e-12);
            CHECK(s <= std::max({a, b, c}) + 1e-12);
        }
    }
    SECTION("any zero component collapses the score") {
        CHECK(wke(0.0, 0.9, 0.9) == 0.0);
        CHECK(wke(0.9, 0.0, 0.9) == 0.0);
        CHECK(wke(0.9, 0.9, 0.0) == 0.0);
    }
    SECTION("equal weights make the score symmetric") {
        for (int i = 0; i < 100; ++i) {
            double a = unit(rng), b = unit(rng), c = unit(rng);
            double s = wke(a, b, c, 1, 1, 1);
            CHECK(wke(b, c, a, 1, 1, 1) == Catch::Approx(s).margin(1e-12));
            CHECK(wke(c, a, b, 1, 1, 1) == Catch::Approx(s).margin(1e-12));
        }
    }
    SECTION("the first component dominates under 3:1:1 weights") {
        // Dropping the heavily weighted component hurts more than dropping
        // either lightly weighted one by the same amount.
        double base = wke(0.9, 0.9, 0.9);
        CHECK(wke(0.6, 0.9, 0.9) < wke(0.9, 0.6, 0.9));
        CHECK(wke(0.6, 0.9, 0.9) < base);
    }
    SECTION("domain errors") {
        CHECK_THROWS_AS(wke(-0.1, 0.5, 0.5), Error);
        CHECK_THROWS_AS(wke(0.5, 1.1, 0.5), Error);
        CHECK_THROWS_AS(wke(0.5, 0.5, 0.5, 0.0, 1.0, 1.0), Error);
        CHECK_THROWS_AS(wke(0.5, 0.5, 0.5, 3.0, -1.0, 1.0), Error);
    }
}

// ---------------------------------------------------------------------------
// F1 and compression
// ---------------------------------------------------------------------------

TEST_CASE("f1 reproduces the reference precision/recall rows") {
    constexpr double tol = 0.001;
    CHECK(detail::f1_of(0.483, 0.591) == Catch::Approx(0.531).margin(tol));
    CHECK(detail::f1_of(0.688, 0.420) == Catch::Approx(0.521).margin(tol));
    CHECK(detail::f1_of(0.394, 0.258) == Catch::Approx(0.312).margin(tol));
    CHECK(detail::f1_of(0.0, 0.0) == 0.0);
    CHECK(detail::f1_of(1.0, 1.0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("compression ratio") {
    double c = compression(323000, 16692);
    CHECK(c >= 0.946);
    CHECK(c <= 0.950);
    CHECK(c == Catch::Approx(0.9483219).margin(1e-6));

    CHECK(compression(100, 100) == 0.0);
    CHECK(compression(100, 0) == 1.0);
    CHECK_THROWS_AS(compression(0, 0), Error);
    CHECK_THROWS_AS(compression(-5, 1), Error);
    CHECK_THROWS_AS(compression(10, 11), Error);
    CHECK_THROWS_AS(compression(10, -1), Error);
}

// ---------------------------------------------------------------------------
// Noisy-OR pooled ground truth
// ---------------------------------------------------------------------------

TEST_CASE("noisy-or membership probability on fixed inputs") {
    CHECK(noisy_or_gt_prob({0.9}) == Catch::Approx(0.9).margin(1e-12));
    CHECK(noisy_or_gt_prob({0.9, 0.5}) == Catch::Approx(0.95).margin(1e-12));
    CHECK(noisy_or_gt_prob({0.9, 0.8}) == Catch::Approx(0.98).margin(1e-12));
    CHECK(noisy_or_gt_prob({1.0, 0.0}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(noisy_or_gt_prob({0.0, 0.0}) == Catch::Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(noisy_or_gt_prob({}), Error);
    CHECK_THROWS_AS(noisy_or_gt_prob({1.2}), Error);
    CHECK_THROWS_AS(noisy_or_gt_prob({0.5, -0.1}), Error);
}

TEST_CASE("noisy-or properties over random prior vectors") {
    std::mt19937 rng(202);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 8);

    for (int iter = 0; iter < 10000; ++iter) {
        std::vector<double> ps(static_cast<size_t>(len(rng)));
        for (double& p : ps) p = unit(rng);

        double v = noisy_or_gt_prob(ps);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);

        // Single-element identity.
        if (ps.size() == 1) REQUIRE(v == Catch::Approx(ps[0]).margin(1e-15));

        // Never below the strongest single predictor.
        double strongest = *std::max_element(ps.begin(), ps.end());
        REQUIRE(v >= strongest - 1e-12);

        // Monotone: one more predictor can only raise it.
        std::vector<double> more = ps;
        more.push_back(unit(rng));
        REQUIRE(noisy_or_gt_prob(more) >= v - 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Probabilistic key precision / recall
// ---------------------------------------------------------------------------

TEST_CASE("probabilistic key scoring on fixed pools") {
    SECTION("disjoint predictions split the expected ground truth") {
        std::map<std::string, std::set<std::string>> keysets{
            {"m1", {"voltage"}},
            {"m2", {"wattage"}},
        };
        std::map<std::string, double> priors{{"m1", 0.9}, {"m2", 0.5}};
        auto rep = prob_precision_recall(keysets, priors);
        CHECK(rep.pooled_keys == 2);
        CHECK(rep.gt_hat == Catch::Approx(1.4).margin(1e-12));
        CHECK(rep.per_model.at("m1").tp == Catch::Approx(0.9).margin(1e-12));
        CHECK(rep.per_model.at("m1").p_prec == Catch::Approx(0.9).margin(1e-12));
        CHECK(rep.per_model.at("m1").p_rec == Catch::Approx(0.9 / 1.4).margin(1e-12));
        CHECK(rep.per_model.at("m2").p_rec == Catch::Approx(0.5 / 1.4).margin(1e-12));
    }
    SECTION("a shared key pools its predictors") {
        std::map<std::string, std::set<std::string>> keysets{
            {"m1", {"brand"}},
            {"m2", {"brand"}},
        };
        std::map<std::string, double> priors{{"m1", 0.9}, {"m2", 0.8}};
        auto rep = prob_precision_recall(keysets, priors);
        CHECK(rep.pooled_keys == 1);
        CHECK(rep.gt_hat == Catch::Approx(0.98).margin(1e-12));
        CHECK(rep.per_model.at("m1").p_prec == Catch::Approx(0.98).margin(1e-12));
        CHECK(rep.per_model.at("m1").p_rec == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("an empty key set scores zero precision and recall") {
        std::map<std::string, std::set<std::string>> keysets{
            {"m1", {"brand"}},
            {"m2", {}},
        };
        std::map<std::string, double> priors{{"m1", 0.9}, {"m2", 0.8}};
        auto rep = prob_precision_recall(keysets, priors);
        CHECK(rep.per_model.at("m2").p_prec == 0.0);
        CHECK(rep.per_model.at("m2").p_rec == 0.0);
    }
    SECTION("missing prior is an error") {
        std::map<std::string, std::set<std::string>> keysets{{"m1", {"brand"}}};
        CHECK_THROWS_AS(prob_precision_recall(keysets, {}), Error);
    }
}

namespace {

// Brute-force oracle: P(key in GT) by explicit enumeration over all subsets
// of the models that predicted the key — the probability that at least one of
// them is right. Equivalent to noisy-OR but computed the long way.
double subset_membership_prob(const std::vector<double>& ps) {
    size_t m = ps.size();
    double total = 0.0;
    for (size_t mask = 1; mask < (size_t{1} << m); ++mask) {
        double term = 1.0;
        for (size_t j = 0; j < m; ++j)
            term *= (mask >> j & 1) ? ps[j] : 1.0 - ps[j];
        total += term;
    }
    return total;
}

} // namespace

TEST_CASE("probabilistic key scoring matches a subset-enumeration oracle") {
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> model_count(1, 5);
    std::uniform_int_distribution<int> universe(1, 8);

    const std::vector<std::string> pool{"brand",   "color",  "material", "voltage",
                                        "wattage", "weight", "width",    "height"};

    for (int iter = 0; iter < 500; ++iter) {
        int m = model_count(rng);
        int u = universe(rng);
        std::map<std::string, std::set<std::string>> keysets;
        std::map<std::string, double> priors;
        for (int j = 0; j < m; ++j) {
            std::string name = "model" + std::to_string(j);
            priors[name] = unit(rng);
            std::set<std::string> ks;
            for (int k = 0; k < u; ++k)
                if (unit(rng) < 0.5) ks.insert(pool[static_cast<size_t>(k)]);
            keysets[name] = ks;
        }

        auto rep = prob_precision_recall(keysets, priors);

        // Oracle pass.
        std::set<std::string> pooled;
        for (const auto& [name, ks] : keysets) pooled.insert(ks.begin(), ks.end());
        REQUIRE(rep.pooled_keys == pooled.size());

        std::map<std::string, double> key_prob;
        double gt_hat = 0.0;
        for (const auto& key : pooled) {
            std::vector<double> ps;
            for (const auto& [name, ks] : keysets)
                if (ks.count(key)) ps.push_back(priors.at(name));
            key_prob[key] = subset_membership_prob(ps);
            gt_hat += key_prob[key];
        }
        REQUIRE(rep.gt_hat == Catch::Approx(gt_hat).margin(1e-12));

        for (const auto& [name, ks] : keysets) {
            double tp = 0.0;
            for (const auto& key : ks) tp += key_prob.at(key);
            double prec = ks.empty() ? 0.0 : tp / static_cast<double>(ks.size());
            double rec = gt_hat > 0.0 ? tp / gt_hat : 0.0;
            const auto& got = rep.per_model.at(name);
            REQUIRE(got.tp == Catch::Approx(tp).margin(1e-12));
            REQUIRE(got.p_prec == Catch::Approx(prec).margin(1e-12));
            REQUIRE(got.p_rec == Catch::Approx(rec).margin(1e-12));
            REQUIRE(got.key_count == ks.size());
        }
    }
}

// ---------------------------------------------------------------------------
// Edge-level precision / recall / F1
// ---------------------------------------------------------------------------

TEST_CASE("edge scoring on a hand-worked pair") {
    EdgeSet pred, ref;
    pred.products["P1"] = {{"Brand", "Nor"}, {"Color", "Blue"}};
    ref.products["P1"] = {{"brand", "Norwell"}, {"Size", "10 mm"}};

    auto rep = edge_prf(pred, ref);
    REQUIRE(rep.products_compared == 1);
    // Keys: {brand, color} vs {brand, size} -> one hit each way.
    CHECK(rep.keys.precision == Catch::Approx(0.5).margin(1e-12));
    CHECK(rep.keys.recall == Catch::Approx(0.5).margin(1e-12));
    CHECK(rep.keys.f1 == Catch::Approx(0.5).margin(1e-12));
    // Values: "nor" is contained in the reference "norwell"; color has no
    // matching reference key.
    CHECK(rep.values.precision == Catch::Approx(0.5).margin(1e-12));
    CHECK(rep.values.recall == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("edge scoring conventions") {
    SECTION("both sides empty scores a perfect product") {
        EdgeSet pred, ref;
        pred.products["P1"] = {};
        ref.products["P1"] = {};
        auto rep = edge_prf(pred, ref);
        REQUIRE(rep.products_compared == 1);
        CHECK(rep.keys.precision == 1.0);
        CHECK(rep.keys.recall == 1.0);
        CHECK(rep.values.precision == 1.0);
        CHECK(rep.values.recall == 1.0);
    }
    SECTION("one empty side scores zero") {
        EdgeSet pred, ref;
        pred.products["P1"] = {};
        ref.products["P1"] = {{"brand", "Norwell"}};
        auto rep = edge_prf(pred, ref);
        CHECK(rep.keys.precision == 0.0);
        CHECK(rep.keys.recall == 0.0);
        CHECK(rep.values.precision == 0.0);
    }
    SECTION("only the id intersection is compared") {
        EdgeSet pred, ref;
        pred.products["only-pred"] = {{"brand", "Apex"}};
        pred.products["shared"] = {{"brand", "Apex"}};
        ref.products["shared"] = {{"brand", "Apex"}};
        ref.products["only-ref"] = {{"brand", "Apex"}};
        auto rep = edge_prf(pred, ref);
        CHECK(rep.products_compared == 1);
        CHECK(rep.keys.precision == 1.0);
        CHECK(rep.values.f1 == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("no overlap at all yields an all-zero report") {
        EdgeSet pred, ref;
        pred.products["a"] = {{"brand", "Apex"}};
        ref.products["b"] = {{"brand", "Apex"}};
        auto rep = edge_prf(pred, ref);
        CHECK(rep.products_compared == 0);
        CHECK(rep.keys.f1 == 0.0);
        CHECK(rep.values.f1 == 0.0);
    }
    SECTION("containment is directional: reference must contain prediction") {
        EdgeSet pred, ref;
        pred.products["P"] = {{"size", "10 mm diameter"}};
        ref.products["P"] = {{"size", "10 mm"}};
        auto rep = edge_prf(pred, ref);
        // Prediction is longer than the reference, so it does not match.
        CHECK(rep.values.precision == 0.0);
    }
}

namespace {

struct BruteRow {
    double p = 0, r = 0, f1 = 0;
};

struct BruteReport {
    BruteRow keys, values;
    size_t compared = 0;
};

// Independent re-implementation of the edge scorer used as the oracle.
BruteReport brute_edge_score(const EdgeSet& pred, const EdgeSet& ref) {
    BruteReport out;
    double pk = 0, rk = 0, pv = 0, rv = 0;
    for (const auto& [pid, praw] : pred.products) {
        auto it = ref.products.find(pid);
        if (it == ref.products.end()) continue;
        ++out.compared;

        std::set<std::string> a_keys, b_keys;
        std::set<std::pair<std::string, std::string>> a_pairs, b_pairs;
        for (const auto& [k, v] : praw) {
            a_keys.insert(normalize(k));
            a_pairs.emplace(normalize(k), normalize(v));
        }
        for (const auto& [k, v] : it->second) {
            b_keys.insert(normalize(k));
            b_pairs.emplace(normalize(k), normalize(v));
        }

        if (a_keys.empty() && b_keys.empty()) {
            pk += 1;
            rk += 1;
        } else {
            size_t hits = 0;
            for (const auto& k : a_keys)
                if (b_keys.count(k)) ++hits;
            if (!a_keys.empty()) pk += double(hits) / double(a_keys.size());
            if (!b_keys.empty()) rk += double(hits) / double(b_keys.size());
        }

        if (a_pairs.empty() && b_pairs.empty()) {
            pv += 1;
            rv += 1;
        } else {
            size_t hits = 0;
            for (const auto& [k, v] : a_pairs) {
                bool matched = false;
                for (const auto& [bk, bv] : b_pairs)
                    if (bk == k && bv.find(v) != std::string::npos) matched = true;
                if (matched) ++hits;
            }
            if (!a_pairs.empty()) pv += double(hits) / double(a_pairs.size());
            if (!b_pairs.empty()) rv += double(hits) / double(b_pairs.size());
        }
    }
    if (out.compared == 0) return out;
    double n = double(out.compared);
    out.keys = {pk / n, rk / n, 0};
    out.values = {pv / n, rv / n, 0};
    auto f1 = [](double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; };
    out.keys.f1 = f1(out.keys.p, out.keys.r);
    out.values.f1 = f1(out.values.p, out.values.r);
    return out;
}

EdgeSet random_edgeset(std::mt19937& rng) {
    static const std::vector<std::string> keys{"Brand", "Color",   "Material",
                                               "Width", "Voltage", "Pack Quantity"};
    static const std::vector<std::string> values{"Norwell",   "Apex Dark Blue", "Stainless Steel",
                                                 "10 mm",     "230 V",          "12",
                                                 "ABS Plastic"};
    std::uniform_int_distribution<int> nprod(0, 6);
    std::uniform_int_distribution<int> npairs(0, 5);
    std::uniform_int_distribution<size_t> ki(0, keys.size() - 1);
    std::uniform_int_distribution<size_t> vi(0, values.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EdgeSet es;
    int n = nprod(rng);
    for (int i = 0; i < n; ++i) {
        std::string pid = "P" + std::to_string(i);
        auto& pairs = es.products[pid]; // may stay empty
        int m = npairs(rng);
        for (int j = 0; j < m; ++j) {
            std::string v = values[vi(rng)];
            // Sometimes truncate to exercise the substring containment rule.
            if (unit(rng) < 0.3 && v.size() > 3) v = v.substr(0, v.size() / 2);
            pairs.emplace(keys[ki(rng)], v);
        }
    }
    return es;
}

} // namespace

TEST_CASE("edge scoring matches a brute-force oracle on random graphs") {
    std::mt19937 rng(404);
    for (int iter = 0; iter < 500; ++iter) {
        EdgeSet pred = random_edgeset(rng);
        EdgeSet ref = random_edgeset(rng);
        auto got = edge_prf(pred, ref);
        auto want = brute_edge_score(pred, ref);
        REQUIRE(got.products_compared == want.compared);
        REQUIRE(got.keys.precision == want.keys.p);
        REQUIRE(got.keys.recall == want.keys.r);
        REQUIRE(got.keys.f1 == want.keys.f1);
        REQUIRE(got.values.precision == want.values.p);
        REQUIRE(got.values.recall == want.values.r);
        REQUIRE(got.values.f1 == want.values.f1);
    }
}

TEST_CASE("edge sets round-trip through the JSONL file format") {
    EdgeSet es;
    es.products["P1"] = {{"Brand", "Norwell"}, {"Color", "Blue"}};
    es.products["P2"] = {};
    es.products["P3"] = {{"Width", "10 mm"}};

    auto path = (std::filesystem::temp_directory_path() / "autopkg_edgeset_test.jsonl").string();
    save_edgeset(path, es);
    EdgeSet back = load_edgeset(path);
    REQUIRE(back.products.size() == 3);
    CHECK(back.products.at("P1") == es.products.at("P1"));
    CHECK(back.products.at("P2").empty());
    CHECK(back.products.at("P3") == es.products.at("P3"));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_edgeset("/nonexistent/edges.jsonl"), Error);
}

// ---------------------------------------------------------------------------
// Cohen's kappa
// ---------------------------------------------------------------------------

TEST_CASE("kappa on fixed label vectors") {
    // Observed agreement 0.5 equals chance agreement for this split.
    CHECK(cohen_kappa({"x", "x", "y", "y"}, {"x", "y", "x", "y"}) ==
          Catch::Approx(0.0).margin(1e-12));
    // Perfect agreement.
    CHECK(cohen_kappa({"a", "b", "c"}, {"a", "b", "c"}) == 1.0);
    // Both raters constant and identical: chance agreement is 1, defined as 1.
    CHECK(cohen_kappa({"a", "a", "a"}, {"a", "a", "a"}) == 1.0);
    // Systematic disagreement goes negative.
    CHECK(cohen_kappa({"x", "y"}, {"y", "x"}) < 0.0);

    CHECK_THROWS_AS(cohen_kappa({"a"}, {"a", "b"}), Error);
    CHECK_THROWS_AS(cohen_kappa({}, {}), Error);
}

namespace {

// Confusion-matrix oracle for kappa.
double kappa_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> labels(a.begin(), a.end());
    labels.insert(b.begin(), b.end());
    std::map<std::string, std::map<std::string, size_t>> m;
    for (size_t i = 0; i < a.size(); ++i) ++m[a[i]][b[i]];
    double n = double(a.size());
    double po = 0.0, pe = 0.0;
    for (const auto& l : labels) {
        double diag = 0.0, row = 0.0, col = 0.0;
        if (m.count(l) && m.at(l).count(l)) diag = double(m.at(l).at(l));
        for (const auto& l2 : labels) {
            if (m.count(l) && m.at(l).count(l2)) row += double(m.at(l).at(l2));
            if (m.count(l2) && m.at(l2).count(l)) col += double(m.at(l2).at(l));
        }
        po += diag / n;
        pe += (row / n) * (col / n);
    }
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

} // namespace

TEST_CASE("kappa matches a confusion-matrix oracle on random labelings") {
    std::mt19937 rng(505);
    const std::vector<std::string> alphabet{"w", "x", "y", "z"};
    std::uniform_int_distribution<size_t> len(2, 40);
    std::uniform_int_distribution<size_t> li(0, alphabet.size() - 1);

    for (int iter = 0; iter < 1000; ++iter) {
        size_t n = len(rng);
        std::vector<std::string> a(n), b(n);
        for (size_t i = 0; i < n; ++i) {
            a[i] = alphabet[li(rng)];
            b[i] = alphabet[li(rng)];
        }
        REQUIRE(cohen_kappa(a, b) == Catch::Approx(kappa_oracle(a, b)).margin(1e-12));
        // Self-agreement is always 1, even for constant vectors.
        REQUIRE(cohen_kappa(a, a) == 1.0);
    }
}

// ---------------------------------------------------------------------------
// Consensus and judge accuracy
// ---------------------------------------------------------------------------

TEST_CASE("majority consensus") {
    using Labels = std::vector<std::string>;

    SECTION("unanimity and clear majorities resolve") {
        std::vector<Labels> judges{
            {"a", "a", "b"}, {"a", "b", "b"}, {"a", "a", "b"}, {"a", "b", "c"}, {"a", "a", "b"},
        };
        auto c = majority_consensus(judges, 3);
        REQUIRE(c.size() == 3);
        CHECK(c[0] == "a"); // 5 votes
        CHECK(c[1] == "a"); // 3 votes
        CHECK(c[2] == "b"); // 4 votes
    }
    SECTION("no label reaching the threshold abstains") {
        std::vector<Labels> judges{{"a"}, {"a"}, {"b"}, {"b"}, {"c"}};
        auto c = majority_consensus(judges, 3);
        REQUIRE(c.size() == 1);
        CHECK_FALSE(c[0].has_value());
    }
    SECTION("two labels reaching the threshold is a tie and abstains") {
        std::vector<Labels> judges{{"a"}, {"a"}, {"a"}, {"b"}, {"b"}, {"b"}};
        auto c = majority_consensus(judges, 3);
        CHECK_FALSE(c[0].has_value());
    }
    SECTION("threshold 1 with a single judge echoes the labels") {
        auto c = majority_consensus({{"x", "y"}}, 1);
        CHECK(c[0] == "x");
        CHECK(c[1] == "y");
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(majority_consensus({}, 3), Error);
        CHECK_THROWS_AS(majority_consensus({{"a"}}, 0), Error);
        CHECK_THROWS_AS(majority_consensus({{"a"}, {"a"}}, 3), Error);
        CHECK_THROWS_AS(majority_consensus({{"a", "b"}, {"a"}, {"a"}}, 3), Error);
    }
}

TEST_CASE("consensus abstains exactly when no label reaches the threshold") {
    // With five judges and a threshold of three, two labels can never both
    // reach the threshold, so abstention must coincide with max votes < 3.
    std::mt19937 rng(606);
    const std::vector<std::string> alphabet{"a", "b", "c"};
    std::uniform_int_distribution<size_t> li(0, alphabet.size() - 1);

    for (int iter = 0; iter < 300; ++iter) {
        std::vector<std::vector<std::string>> judges(5, std::vector<std::string>(10));
        for (auto& j : judges)
            for (auto& l : j) l = alphabet[li(rng)];
        auto c = majority_consensus(judges, 3);
        for (size_t i = 0; i < 10; ++i) {
            std::map<std::string, size_t> votes;
            for (const auto& j : judges) ++votes[j[i]];
            size_t best = 0;
            std::string best_label;
            for (const auto& [l, cnt] : votes)
                if (cnt > best) best = cnt, best_label = l;
            if (best >= 3) {
                REQUIRE(c[i].has_value());
                REQUIRE(*c[i] == best_label);
            } else {
                REQUIRE_FALSE(c[i].has_value());
            }
        }
    }
}

TEST_CASE("accuracy against consensus") {
    std::vector<std::optional<std::string>> consensus{"a", std::nullopt, "b", "b"};
    CHECK(accuracy_vs_consensus({"a", "z", "b", "b"}, consensus) == 1.0);
    CHECK(accuracy_vs_consensus({"a", "z", "b", "c"}, consensus) ==
          Catch::Approx(2.0 / 3.0).margin(1e-12));
    CHECK(accuracy_vs_consensus({"z", "z", "z", "z"}, consensus) == 0.0);

    // Abstained-only consensus has nothing to grade.
    std::vector<std::optional<std::string>> silent{std::nullopt, std::nullopt};
    CHECK(accuracy_vs_consensus({"a", "b"}, silent) == 0.0);

    CHECK_THROWS_AS(accuracy_vs_consensus({"a"}, consensus), Error);
}
