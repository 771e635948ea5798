// autopkg: build and query product-attribute knowledge graphs from listing
// corpora, and score extraction output.
//
// Exit codes: 0 success, 1 domain failure (not found, metric domain error),
// 2 usage or input error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "autopkg/autopkg.hpp"

namespace fs = std::filesystem;
using namespace autopkg;

namespace {

int classify_error(const Error& ex) {
    switch (ex.code()) {
        case Errc::NotFound:
        case Errc::DomainError:
        case Errc::EmptyInput:
        case Errc::MissingPrior:
        case Errc::LengthMismatch:
        case Errc::UnknownNode:
            return 1;
        default:
            return 2;
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoError, "cannot write file: " + path);
    out << content;
    if (!out) raise(Errc::IoError, "short write: " + path);
}

ojson parse_json_file(const std::string& path) {
    try {
        return ojson::parse(read_text_file(path));
    } catch (const ojson::parse_error& ex) {
        raise(Errc::JsonParseError, path + ": " + ex.what());
    }
}

void emit_report(const ojson& j, const std::string& out_path) {
    std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) write_text_file(out_path, text);
}

ConfigMap env_overrides() {
    ConfigMap out;
    for (const auto& [env_name, key] : env_key_map()) {
        const char* v = std::getenv(env_name.c_str());
        if (v && *v) out[key] = v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildFlags {
    std::string corpus;
    std::string config_path;
    std::string out_dir = "out";
    std::string policy;
    std::string backend;
    std::string preset;
    long long k = -1;
    bool no_retrieval_context = false;
    bool no_images = false;
    long long workers = -1;
    long long seed = -1;
};

int cmd_build(const BuildFlags& flags) {
    ConfigMap file_cfg;
    if (!flags.config_path.empty()) file_cfg = load_config_file(flags.config_path);
    ConfigMap flag_cfg;
    if (!flags.policy.empty()) flag_cfg["policy"] = flags.policy;
    if (!flags.backend.empty()) flag_cfg["backend"] = flags.backend;
    if (!flags.preset.empty()) flag_cfg["preset"] = flags.preset;
    if (flags.k >= 0) flag_cfg["k"] = std::to_string(flags.k);
    if (flags.no_retrieval_context) flag_cfg["retrieval_context"] = "false";
    if (flags.no_images) flag_cfg["use_images"] = "false";
    if (flags.workers >= 1) flag_cfg["workers"] = std::to_string(flags.workers);
    if (flags.seed >= 0) flag_cfg["seed"] = std::to_string(flags.seed);
    Config cfg = resolve_config(file_cfg, env_overrides(), flag_cfg);

    if (!fs::exists(flags.corpus)) raise(Errc::IoError, "corpus not found: " + flags.corpus);
    std::vector<Listing> corpus = load_corpus(flags.corpus);

    RunManifest manifest;
    manifest.started_at = iso8601_utc_now();
    manifest.config = config_to_json(cfg);
    manifest.corpus_path = flags.corpus;
    manifest.corpus_digest = sha256_file(flags.corpus);
    manifest.prompt_digests = prompt_template_digests();

    // Backend wiring. Offline mode ("rule") scripts every agent from the
    // listing's own specification block and applies deterministic decision
    // rules, so builds are reproducible without any model endpoint.
    std::unique_ptr<Embedder> embedder;
    if (cfg.embedder == "http")
        embedder = std::make_unique<HttpEmbedder>(cfg.embed_model.endpoint, cfg.embed_model.model,
                                                  cfg.embed_model.api_key);
    else
        embedder = std::make_unique<FallbackEmbedder>();

    std::unique_ptr<DecisionBackend> decision;
    std::unique_ptr<TypeAgent> type_agent;
    std::unique_ptr<KeyAgent> key_agent;
    std::unique_ptr<ValueAgent> value_agent;
    if (cfg.decision_backend == "llm") {
        decision = std::make_unique<LlmDecisionBackend>(
            ChatClient(cfg.kgd_model.endpoint, cfg.kgd_model.model, cfg.kgd_model.api_key),
            cfg.params);
        type_agent = std::make_unique<LlmTypeAgent>(
            ChatClient(cfg.type_model.endpoint, cfg.type_model.model, cfg.type_model.api_key),
            cfg.params);
        key_agent = std::make_unique<LlmKeyAgent>(
            ChatClient(cfg.key_model.endpoint, cfg.key_model.model, cfg.key_model.api_key),
            cfg.params);
        value_agent = std::make_unique<LlmValueAgent>(
            ChatClient(cfg.value_model.endpoint, cfg.value_model.model, cfg.value_model.api_key),
            cfg.params);
    } else {
        decision = std::make_unique<RuleBackend>();
        type_agent = std::make_unique<synth::SpecTypeAgent>();
        key_agent = std::make_unique<synth::ProfileKeyAgent>();
        value_agent = std::make_unique<synth::SpecValueAgent>();
    }

    Graph graph;
    RetrievalIndex index(*embedder);
    KgdOptions kgd_opts;
    kgd_opts.policy = cfg.policy;
    kgd_opts.k = cfg.k;
    kgd_opts.retrieval_context = cfg.retrieval_context;
    Kgd kgd(graph, index, *decision, kgd_opts);

    PipelineConfig pipe_cfg;
    pipe_cfg.use_images = cfg.use_images;
    pipe_cfg.workers = cfg.workers;
    Pipeline pipeline(kgd, *type_agent, *key_agent, *value_agent, pipe_cfg);
    PipelineReport report = pipeline.run(corpus);

    fs::create_directories(flags.out_dir);
    std::string snapshot_path = (fs::path(flags.out_dir) / "snapshot.json").string();
    std::string report_path = (fs::path(flags.out_dir) / "report.json").string();
    std::string manifest_path = (fs::path(flags.out_dir) / "manifest.json").string();

    graph.save_file(snapshot_path);
    write_text_file(report_path, Pipeline::report_to_json(report).dump(2) + "\n");

    manifest.backends = {{"kgd", decision->id()},
                         {"type", type_agent->id()},
                         {"key", key_agent->id()},
                         {"value", value_agent->id()},
                         {"embedding", embedder->id()}};
    manifest.outputs = {{"snapshot", snapshot_path},
                        {"report", report_path},
                        {"manifest", manifest_path}};
    manifest.finished_at = iso8601_utc_now();
    write_text_file(manifest_path, manifest_to_json(manifest).dump(2) + "\n");

    GraphStats stats = graph.stats();
    std::cout << "listings: " << report.listings << " (assigned " << report.assigned
              << ", abstained " << report.abstained << ")\n"
              << "candidates: " << report.proposed << " proposed, " << report.added << " added, "
              << report.merged << " merged, " << report.replaced << " replaced, "
              << report.discarded << " discarded\n"
              << "graph: " << stats.node_total() << " nodes, " << stats.edge_total() << " edges\n"
              << "snapshot: " << snapshot_path << "\n"
              << "sha256:" << sha256_file(snapshot_path) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// gen-corpus
// ---------------------------------------------------------------------------

int cmd_gen_corpus(std::uint64_t seed, std::size_t listings, std::size_t types, double junk_rate,
                   const std::string& out_dir) {
    synth::SynthOptions opt;
    opt.seed = seed;
    opt.listings = listings;
    opt.type_count = types;
    opt.junk_rate = junk_rate;
    synth::SynthCorpus corpus = synth::generate(opt);

    fs::create_directories(out_dir);
    std::string corpus_path = (fs::path(out_dir) / "corpus.jsonl").string();
    std::string truth_path = (fs::path(out_dir) / "truth.json").string();
    save_corpus(corpus_path, corpus.listings);
    write_text_file(truth_path, corpus.truth.dump(2) + "\n");
    std::cout << "corpus: " << corpus_path << " (" << corpus.listings.size() << " listings)\n"
              << "truth: " << truth_path << "\n"
              << "sha256:" << sha256_file(corpus_path) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval_types(double acc, double comp, double cov, long long raw, long long canonical,
                   const std::string& out_path) {
    ojson j;
    j["inputs"] = {{"acceptance", acc}, {"compression", comp}, {"coverage", cov}};
    j["wke"] = wke(acc, comp, cov);
    if (raw >= 0 && canonical >= 0) {
        j["compression_check"] = {{"raw", raw},
                                  {"canonical", canonical},
                                  {"compression", compression(static_cast<std::size_t>(raw),
                                                              static_cast<std::size_t>(canonical))}};
    }
    emit_report(j, out_path);
    return 0;
}

int cmd_eval_keys(std::optional<double> acc, std::optional<double> pprec,
                  std::optional<double> prec, const std::string& keysets_path,
                  const std::string& priors_path, const std::string& out_path) {
    ojson j;
    if (!keysets_path.empty()) {
        ojson keysets_json = parse_json_file(keysets_path);
        ojson priors_json = parse_json_file(priors_path);
        std::map<std::string, std::set<std::string>> keysets;
        std::map<std::string, double> priors;
        for (const auto& [model, keys] : keysets_json.items())
            for (const auto& k : keys) keysets[model].insert(k.get<std::string>());
        for (const auto& [model, p] : priors_json.items()) priors[model] = p.get<double>();
        ProbKeyReport rep = prob_precision_recall(keysets, priors);
        j["gt_hat"] = rep.gt_hat;
        j["pooled_keys"] = rep.pooled_keys;
        j["per_model"] = ojson::object();
        for (const auto& [model, score] : rep.per_model) {
            ojson row = {{"tp", score.tp},
                         {"p_precision", score.p_prec},
                         {"p_recall", score.p_rec},
                         {"keys", score.key_count}};
            if (acc) row["wke"] = wke(*acc, score.p_prec, score.p_rec);
            j["per_model"][model] = row;
        }
    } else {
        if (!acc || !pprec || !prec)
            raise(Errc::DomainError,
                  "eval keys needs either --keysets/--priors or all of --acc/--pprec/--rec");
        j["inputs"] = {{"acceptance", *acc}, {"p_precision", *pprec}, {"p_recall", *prec}};
        j["wke"] = wke(*acc, *pprec, *prec);
    }
    emit_report(j, out_path);
    return 0;
}

int cmd_eval_edges(const std::string& pred_path, const std::string& ref_path,
                   const std::string& out_path) {
    EdgeSet pred = load_edgeset(pred_path);
    EdgeSet ref = load_edgeset(ref_path);
    EdgePrfReport rep = edge_prf(pred, ref);
    ojson j;
    j["products_compared"] = rep.products_compared;
    j["keys"] = {{"precision", rep.keys.precision},
                 {"recall", rep.keys.recall},
                 {"f1", rep.keys.f1}};
    j["values"] = {{"precision", rep.values.precision},
                   {"recall", rep.values.recall},
                   {"f1", rep.values.f1}};
    j["conventions"] = {{"empty_prediction", "both-empty scores 1.0, one-sided empty scores 0.0"},
                        {"f1", "harmonic mean of macro precision and macro recall"},
                        {"value_recall_denominator",
                         "reference pair count per product; duplicates in predictions are "
                         "deduplicated after normalization"}};
    emit_report(j, out_path);
    return 0;
}

std::vector<std::string> load_label_vector(const std::string& path) {
    ojson j = parse_json_file(path);
    if (!j.is_array()) raise(Errc::JsonParseError, path + ": expected a JSON array of labels");
    std::vector<std::string> out;
    for (const auto& v : j) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    return out;
}

int cmd_eval_kappa(const std::string& a_path, const std::string& b_path,
                   const std::string& out_path) {
    std::vector<std::string> a = load_label_vector(a_path);
    std::vector<std::string> b = load_label_vector(b_path);
    ojson j;
    j["n"] = a.size();
    j["kappa"] = cohen_kappa(a, b);
    emit_report(j, out_path);
    return 0;
}

int cmd_eval_consensus(const std::string& judges_path, long long threshold,
                       const std::string& out_path) {
    ojson judges_json = parse_json_file(judges_path);
    if (!judges_json.is_object())
        raise(Errc::JsonParseError, judges_path + ": expected {judge: [labels...]}");
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> judges;
    for (const auto& [name, labels] : judges_json.items()) {
        names.push_back(name);
        std::vector<std::string> vec;
        for (const auto& l : labels) vec.push_back(l.get<std::string>());
        judges.push_back(std::move(vec));
    }
    auto consensus = majority_consensus(judges, static_cast<std::size_t>(threshold));
    ojson j;
    j["threshold"] = threshold;
    j["consensus"] = ojson::array();
    std::size_t abstained = 0;
    for (const auto& label : consensus) {
        if (label)
            j["consensus"].push_back(*label);
        else {
            j["consensus"].push_back(nullptr);
            ++abstained;
        }
    }
    j["abstained"] = abstained;
    j["judge_accuracy"] = ojson::object();
    for (std::size_t i = 0; i < judges.size(); ++i)
        j["judge_accuracy"][names[i]] = accuracy_vs_consensus(judges[i], consensus);
    emit_report(j, out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

std::optional<NodeId> resolve_query(const Graph& g, const std::string& query,
                                    const std::string& kind_name) {
    bool numeric = !query.empty() &&
                   std::all_of(query.begin(), query.end(),
                               [](unsigned char c) { return std::isdigit(c); });
    if (numeric) {
        NodeId id = std::stoll(query);
        if (g.exists(id)) return id;
        return std::nullopt;
    }
    std::vector<NodeKind> kinds;
    if (!kind_name.empty()) {
        std::string k = normalize(kind_name);
        if (k == "product")
            kinds.push_back(NodeKind::Product);
        else if (k == "product_type" || k == "product type" || k == "type")
            kinds.push_back(NodeKind::ProductType);
        else if (k == "attribute_key" || k == "attribute key" || k == "key")
            kinds.push_back(NodeKind::AttributeKey);
        else if (k == "value")
            kinds.push_back(NodeKind::Value);
        else
            raise(Errc::DomainError, "unknown kind: " + kind_name);
    } else {
        kinds = {NodeKind::Product, NodeKind::ProductType, NodeKind::AttributeKey,
                 NodeKind::Value};
    }
    for (NodeKind kind : kinds)
        if (auto id = g.find(kind, query)) return id;
    return std::nullopt;
}

int cmd_inspect(const std::string& snapshot_path, const std::string& query,
                const std::string& kind_name) {
    Graph g = Graph::load_file(snapshot_path);
    auto id = resolve_query(g, query, kind_name);
    if (!id) raise(Errc::NotFound, "no node matches '" + query + "'");
    const CanonicalNode& n = g.node(*id);
    std::cout << "node " << n.id << " [" << node_kind_name(n.kind) << "] " << n.name << "\n";
    if (n.description) std::cout << "  description: " << *n.description << "\n";
    for (const auto& s : n.synonyms) std::cout << "  synonym: " << s << "\n";
    for (const Edge& e : g.edges()) {
        if (e.src == *id)
            std::cout << "  -" << edge_kind_name(e.kind) << "-> " << e.dst << " ["
                      << node_kind_name(g.node(e.dst).kind) << "] " << g.node(e.dst).name << "\n";
        else if (e.dst == *id)
            std::cout << "  <-" << edge_kind_name(e.kind) << "- " << e.src << " ["
                      << node_kind_name(g.node(e.src).kind) << "] " << g.node(e.src).name << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Product-attribute knowledge graph builder and evaluation toolkit"};
    app.require_subcommand(1);

    // build
    BuildFlags bf;
    auto* build = app.add_subcommand("build", "Run the extraction pipeline over a listing corpus");
    build->add_option("corpus", bf.corpus, "Listing corpus (JSONL)")->required();
    build->add_option("--config", bf.config_path, "Configuration file (key=value)");
    build->add_option("--out", bf.out_dir, "Output directory (default: out)");
    build->add_option("--policy", bf.policy, "Decision policy: basic|strict|no-discard");
    build->add_option("--backend", bf.backend, "Decision backend: rule|llm");
    build->add_option("--preset", bf.preset, "Model tier: minimal|balanced|full");
    build->add_option("--k", bf.k, "Retrieval depth");
    build->add_flag("--no-retrieval-context", bf.no_retrieval_context,
                    "Decide without graph neighborhood context");
    build->add_flag("--no-images", bf.no_images, "Exclude listing images from value extraction");
    build->add_option("--workers", bf.workers, "Concurrent type-suggestion prefetches");
    build->add_option("--seed", bf.seed, "Run seed (recorded in the manifest)");

    // gen-corpus
    std::uint64_t gc_seed = 17;
    std::size_t gc_listings = 100, gc_types = 12;
    double gc_junk = 0.06;
    std::string gc_out = "out";
    auto* gen = app.add_subcommand("gen-corpus",
                                   "Generate a deterministic synthetic listing corpus with truth");
    gen->add_option("--seed", gc_seed, "Generator seed");
    gen->add_option("--listings", gc_listings, "Number of listings");
    gen->add_option("--types", gc_types, "Number of distinct ground-truth types");
    gen->add_option("--junk-rate", gc_junk, "Fraction of listings with no induceable type");
    gen->add_option("--out", gc_out, "Output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "Score extraction output");
    eval->require_subcommand(1);
    std::string eval_out;

    double et_acc = 0, et_comp = 0, et_cov = 0;
    long long et_raw = -1, et_canon = -1;
    auto* et = eval->add_subcommand("types", "Type-induction efficiency score");
    et->add_option("--acc", et_acc, "Acceptance rate")->required();
    et->add_option("--comp", et_comp, "Compression rate")->required();
    et->add_option("--cov", et_cov, "Coverage rate")->required();
    et->add_option("--raw", et_raw, "Raw candidate count (optional compression cross-check)");
    et->add_option("--canonical", et_canon, "Canonical node count");
    et->add_option("--out", eval_out, "Also write the report here");

    std::optional<double> ek_acc, ek_pprec, ek_prec;
    std::string ek_keysets, ek_priors;
    auto* ek = eval->add_subcommand("keys", "Key-discovery efficiency / probabilistic P-R");
    double ek_acc_v = -1, ek_pprec_v = -1, ek_prec_v = -1;
    ek->add_option("--acc", ek_acc_v, "Acceptance rate");
    ek->add_option("--pprec", ek_pprec_v, "Probabilistic precision");
    ek->add_option("--rec", ek_prec_v, "Probabilistic recall");
    ek->add_option("--keysets", ek_keysets, "JSON {model: [keys...]}");
    ek->add_option("--priors", ek_priors, "JSON {model: acceptance prior}");
    ek->add_option("--out", eval_out, "Also write the report here");

    std::string ee_pred, ee_ref;
    auto* ee = eval->add_subcommand("edges", "Edge-level macro precision/recall/F1");
    ee->add_option("pred", ee_pred, "Predicted edge set (JSONL)")->required();
    ee->add_option("ref", ee_ref, "Reference edge set (JSONL)")->required();
    ee->add_option("--out", eval_out, "Also write the report here");

    std::string ka_a, ka_b;
    auto* ka = eval->add_subcommand("kappa", "Cohen's kappa between two label vectors");
    ka->add_option("a", ka_a, "First label vector (JSON array)")->required();
    ka->add_option("b", ka_b, "Second label vector (JSON array)")->required();
    ka->add_option("--out", eval_out, "Also write the report here");

    std::string ec_judges;
    long long ec_threshold = 3;
    auto* ec = eval->add_subcommand("consensus", "Majority-vote consensus over a judge panel");
    ec->add_option("judges", ec_judges, "JSON {judge: [labels...]}")->required();
    ec->add_option("--threshold", ec_threshold, "Votes required (default 3)");
    ec->add_option("--out", eval_out, "Also write the report here");

    // inspect
    std::string in_snapshot, in_query, in_kind;
    auto* inspect = app.add_subcommand("inspect", "Show a node and its one-hop neighborhood");
    inspect->add_option("snapshot", in_snapshot, "Graph snapshot (JSON)")->required();
    inspect->add_option("node", in_query, "Node id or name")->required();
    inspect->add_option("--kind", in_kind,
                        "Restrict name lookup: product|product_type|attribute_key|value");

    try {
        app.parse(argc, argv);
        if (*build) return cmd_build(bf);
        if (*gen) return cmd_gen_corpus(gc_seed, gc_listings, gc_types, gc_junk, gc_out);
        if (*et) return cmd_eval_types(et_acc, et_comp, et_cov, et_raw, et_canon, eval_out);
        if (*ek) {
            if (ek_acc_v >= 0) ek_acc = ek_acc_v;
            if (ek_pprec_v >= 0) ek_pprec = ek_pprec_v;
            if (ek_prec_v >= 0) ek_prec = ek_prec_v;
            return cmd_eval_keys(ek_acc, ek_pprec, ek_prec, ek_keysets, ek_priors, eval_out);
        }
        if (*ee) return cmd_eval_edges(ee_pred, ee_ref, eval_out);
        if (*ka) return cmd_eval_kappa(ka_a, ka_b, eval_out);
        if (*ec) return cmd_eval_consensus(ec_judges, ec_threshold, eval_out);
        if (*inspect) return cmd_inspect(in_snapshot, in_query, in_kind);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return classify_error(ex);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
