#include "aai/cli.hpp"

#include "aai/corpus.hpp"
#include "aai/error.hpp"
#include "aai/evaluation.hpp"
#include "aai/parallel.hpp"
#include "aai/scoring.hpp"
#include "aai/social_density.hpp"
#include "aai/transition.hpp"
#include "aai/walks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace aai {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json alpha_json(double a) { return std::isinf(a) ? json("inf") : json(a); }

json to_json(const RunConfig& c) {
    json j;
    j["corpus"] = c.corpus;
    j["keywords"] = c.keywords;
    j["out_dir"] = c.out_dir;
    j["t"] = c.t;
    j["k"] = c.k;
    j["gamma"] = c.gamma;
    j["alpha"] = alpha_json(c.alpha);
    j["beta"] = c.beta;
    j["beta_grid"] = c.beta_grid;
    j["fusion"] = c.fusion;
    j["min_count"] = c.min_count;
    j["min_edge_size"] = c.min_edge_size;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["walk_length"] = c.walk_length;
    j["walks_per_start"] = c.walks_per_start;
    j["window"] = c.window;
    j["exclude_self"] = c.exclude_self;
    j["transition_steps"] = c.transition_steps;
    j["dim"] = c.dim;
    j["epochs"] = c.epochs;
    j["lr"] = c.lr;
    j["negatives"] = c.negatives;
    j["cosine"] = c.cosine;
    j["sd_method"] = c.sd_method;
    j["sd_true_jaccard"] = c.sd_true_jaccard;
    j["sd_window"] = c.sd_window;
    j["sppmi_shift"] = c.sppmi_shift;
    j["sppmi_alpha"] = c.sppmi_alpha;
    j["normalize_by"] = c.normalize_by;
    j["gnn_setting"] = setting_name(c.gnn.setting);
    j["gnn_layers"] = c.gnn.layers;
    j["gnn_sample_sizes"] = c.gnn.sample_sizes;
    j["gnn_dims"] = c.gnn.dims;
    j["gnn_batch_size"] = c.gnn.batch_size;
    j["gnn_negatives"] = c.gnn.negatives;
    j["gnn_lr"] = c.gnn.lr;
    j["gnn_adam_beta1"] = c.gnn.adam_beta1;
    j["gnn_adam_beta2"] = c.gnn.adam_beta2;
    j["gnn_adam_eps"] = c.gnn.adam_eps;
    j["gnn_include_self"] = c.gnn.include_self;
    j["gnn_trainable_inputs"] = c.gnn.trainable_inputs;
    j["gnn_init_scale"] = c.gnn.init_scale;
    j["gnn_epochs"] = c.gnn.epochs;
    j["gnn_max_steps"] = c.gnn.max_steps;
    return j;
}

template <class T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string(key) + ": wrong type (got " + j.at(key).dump() + ")");
    }
}

double alpha_from(const json& v) {
    if (v.is_string()) {
        const auto s = to_lower(v.get<std::string>());
        if (s == "inf" || s == "infinity") return kInfiniteAlpha;
        throw ValidationError("alpha: expected a number or \"inf\", got " + v.dump());
    }
    if (!v.is_number()) throw ValidationError("alpha: expected a number or \"inf\", got " + v.dump());
    return v.get<double>();
}

RunConfig from_json(const json& j) {
    RunConfig c;
    c.corpus = field<std::string>(j, "corpus");
    c.keywords = field<std::string>(j, "keywords");
    c.out_dir = field<std::string>(j, "out_dir");
    c.t = field<int>(j, "t");
    if (j.at("k").is_number_integer() && j.at("k").get<long long>() < 1)
        throw ValidationError("k: must be >= 1, got " + j.at("k").dump());
    c.k = field<std::size_t>(j, "k");
    c.gamma = field<int>(j, "gamma");
    c.alpha = alpha_from(j.at("alpha"));
    c.beta = field<double>(j, "beta");
    c.beta_grid = field<std::vector<double>>(j, "beta_grid");
    c.fusion = field<std::string>(j, "fusion");
    c.min_count = field<std::size_t>(j, "min_count");
    c.min_edge_size = field<std::size_t>(j, "min_edge_size");
    c.seed = field<std::uint64_t>(j, "seed");
    c.workers = field<unsigned>(j, "workers");
    c.walk_length = field<int>(j, "walk_length");
    c.walks_per_start = field<int>(j, "walks_per_start");
    c.window = field<int>(j, "window");
    c.exclude_self = field<bool>(j, "exclude_self");
    c.transition_steps = field<int>(j, "transition_steps");
    c.dim = field<int>(j, "dim");
    c.epochs = field<int>(j, "epochs");
    c.lr = field<double>(j, "lr");
    c.negatives = field<int>(j, "negatives");
    c.cosine = field<std::string>(j, "cosine");
    c.sd_method = field<std::string>(j, "sd_method");
    c.sd_true_jaccard = field<bool>(j, "sd_true_jaccard");
    c.sd_window = field<int>(j, "sd_window");
    c.sppmi_shift = field<double>(j, "sppmi_shift");
    c.sppmi_alpha = field<double>(j, "sppmi_alpha");
    c.normalize_by = field<std::string>(j, "normalize_by");
    c.gnn.setting = parse_setting(field<std::string>(j, "gnn_setting"));
    c.gnn.layers = field<int>(j, "gnn_layers");
    c.gnn.sample_sizes = field<std::vector<int>>(j, "gnn_sample_sizes");
    c.gnn.dims = field<std::vector<int>>(j, "gnn_dims");
    c.gnn.batch_size = field<std::size_t>(j, "gnn_batch_size");
    c.gnn.negatives = field<int>(j, "gnn_negatives");
    c.gnn.lr = field<double>(j, "gnn_lr");
    c.gnn.adam_beta1 = field<double>(j, "gnn_adam_beta1");
    c.gnn.adam_beta2 = field<double>(j, "gnn_adam_beta2");
    c.gnn.adam_eps = field<double>(j, "gnn_adam_eps");
    c.gnn.include_self = field<bool>(j, "gnn_include_self");
    c.gnn.trainable_inputs = field<bool>(j, "gnn_trainable_inputs");
    c.gnn.init_scale = field<double>(j, "gnn_init_scale");
    c.gnn.epochs = field<int>(j, "gnn_epochs");
    c.gnn.max_steps = field<std::size_t>(j, "gnn_max_steps");
    c.gnn.seed = c.seed;
    return c;
}

RunConfig merge(const RunConfig& base, const json& patch) {
    if (!patch.is_object()) throw ValidationError("config: top level must be a JSON object");
    json j = to_json(base);
    for (const auto& [key, value] : patch.items()) {
        if (!j.contains(key)) throw ValidationError(key + ": unknown config key");
        j[key] = value;
    }
    return from_json(j);
}

// A raw override string becomes JSON of the same kind as the current value.
json parse_scalar(const json& current, const std::string& raw) {
    if (current.is_string()) return raw;
    try {
        return json::parse(raw);
    } catch (const json::exception&) {
        return raw;
    }
}

RunConfig apply_override(const RunConfig& c, const std::string& key, const std::string& raw) {
    const json j = to_json(c);
    if (!j.contains(key)) throw ValidationError(key + ": unknown config key");
    return merge(c, json{{key, parse_scalar(j.at(key), raw)}});
}

std::string upper(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& f, const std::string& what) { throw ValidationError(f + ": " + what); };
    if (t <= 0) fail("t", "must be a positive year");
    if (k < 1) fail("k", "must be >= 1");
    if (gamma < 1) fail("gamma", "must be >= 1");
    if (!(alpha > 0.0)) fail("alpha", "must be > 0 (or \"inf\")");
    if (!(beta >= 0.0 && beta <= 1.0)) fail("beta", "must lie in [0, 1], got " + format_double(beta));
    for (double b : beta_grid) {
        if (!(b >= 0.0 && b <= 1.0)) fail("beta_grid", "entries must lie in [0, 1], got " + format_double(b));
    }
    try {
        parse_fusion(fusion);
    } catch (const ValidationError& e) {
        fail("fusion", e.what());
    }
    if (min_edge_size < 1) fail("min_edge_size", "must be >= 1");
    if (workers < 1) fail("workers", "must be >= 1");
    if (walk_length < 1) fail("walk_length", "must be >= 1");
    if (walks_per_start < 1) fail("walks_per_start", "must be >= 1");
    if (window < 1) fail("window", "must be >= 1");
    if (transition_steps < 2) fail("transition_steps", "must be >= 2");
    if (dim < 1) fail("dim", "must be >= 1");
    if (epochs < 0) fail("epochs", "must be >= 0");
    if (!(lr > 0.0)) fail("lr", "must be > 0");
    if (negatives < 0) fail("negatives", "must be >= 0");
    if (cosine != "output_hidden" && cosine != "hidden_hidden") fail("cosine", "expected output_hidden or hidden_hidden");
    try {
        parse_sd_method(sd_method);
    } catch (const ValidationError& e) {
        fail("sd_method", e.what());
    }
    if (sd_window < 1) fail("sd_window", "must be >= 1");
    if (!(sppmi_shift > 0.0)) fail("sppmi_shift", "must be > 0");
    if (!std::isfinite(sppmi_alpha)) fail("sppmi_alpha", "must be finite");
    if (normalize_by != "k" && normalize_by != "predictions") fail("normalize_by", "expected k or predictions");
    try {
        gnn.validate();
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    }
}

RunConfig default_run_config() {
    RunConfig c;
    c.beta_grid = default_beta_grid();
    c.workers = default_workers();
    return c;
}

std::string config_to_json(const RunConfig& c) { return to_json(c).dump(2); }

RunConfig config_from_json_text(const std::string& text, const RunConfig& base) {
    json patch;
    try {
        patch = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c = merge(base, patch);
    c.validate();
    return c;
}

RunConfig validate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str(), default_run_config());
}

std::string config_hash(const RunConfig& c) {
    json j = to_json(c);
    j.erase("out_dir");
    j.erase("workers");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

RunConfig apply_env_overrides(RunConfig c, const char* (*getenv_fn)(const char*)) {
    const json keys = to_json(c);
    for (const auto& [key, _] : keys.items()) {
        const char* v = getenv_fn(("AAI_" + upper(key)).c_str());
        if (v) c = apply_override(c, key, v);
    }
    return c;
}

SkipgramResult embed_sequences(const std::vector<std::vector<std::string>>& sequences, int window,
                               const SkipgramConfig& cfg) {
    std::vector<std::string> vocab;
    std::unordered_map<std::string, NodeId> id;
    std::vector<std::vector<NodeId>> seqs;
    seqs.reserve(sequences.size());
    for (const auto& s : sequences) {
        std::vector<NodeId> ids;
        ids.reserve(s.size());
        for (const auto& tok : s) {
            auto [it, inserted] = id.emplace(tok, static_cast<NodeId>(vocab.size()));
            if (inserted) vocab.push_back(tok);
            ids.push_back(it->second);
        }
        seqs.push_back(std::move(ids));
    }
    if (vocab.empty()) throw DomainError("embedding: no tokens in the walk corpus");
    std::vector<SkipPair> pairs;
    for (const auto& [a, b] : window_pairs(seqs, window)) pairs.push_back({a, b, 1.0});
    const auto sampler = build_negative_sampler(occurrence_counts(seqs, vocab.size()));
    return train_skipgram(std::move(vocab), pairs, sampler, cfg);
}

std::vector<std::vector<std::string>> walk_tokens(const Hypergraph& h, const WalkConfig& cfg) {
    const auto wc = generate_walks(h, cfg);
    std::vector<std::vector<std::string>> out;
    out.reserve(wc.sequences.size());
    for (const auto& s : wc.sequences) {
        std::vector<std::string> toks;
        toks.reserve(s.size());
        for (NodeId v : s) toks.push_back(h.node(v).label);
        out.push_back(std::move(toks));
    }
    return out;
}

std::vector<std::vector<std::string>> read_token_sequences(std::istream& in) {
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string tok; ls >> tok;) toks.push_back(tok);
        if (!toks.empty()) out.push_back(std::move(toks));
    }
    return out;
}

ScoreTable plausibility_table(const EmbeddingTable& E, const std::string& property,
                              const std::set<std::string>& candidates, CosineMode mode) {
    ScoreTable t;
    t.provenance = Provenance::Plausibility;
    t.metadata["cosine"] = mode == CosineMode::OutputHidden ? "output_hidden" : "hidden_hidden";
    t.metadata["direction"] = "max_first";
    if (!E.contains(property)) throw LookupError("property token '" + property + "' is not in the embedding");
    for (const auto& c : candidates) {
        if (E.contains(c)) {
            t.values[c] = plausibility_score(E, property, c, mode);
        } else {
            t.values[c] = 0.0;
            t.flags[c] = "not_in_vocabulary";
        }
    }
    return t;
}

ScoreTable spd_table(const Hypergraph& h) {
    const auto p = h.property_node();
    if (!p) throw DomainError("SP-d: the graph has no property node");
    const auto adj = projected_adjacency(h, {NodeKind::Author, NodeKind::Material, NodeKind::Property}, false);
    return shortest_path_distances(h, adj, *p);
}

namespace {

struct StageArgs {
    std::string graph, walks, dw_walks, s1, s2, s1_kind = "sp_d", s2_kind = "plausibility", spd, report;
    std::string methods = "vdw_z,geometric,harmonic";
    std::size_t benchmark = 0;
    bool all_years = false;
};

struct Stage {
    std::string name;
    RunConfig cfg;
    StageArgs args;
    std::string hash;
    std::vector<std::string> artifacts;
    std::ostream* out;

    fs::path path(const std::string& file) const { return fs::path(cfg.out_dir) / file; }
    std::string input(const std::string& given, const std::string& fallback) const {
        const std::string p = given.empty() ? path(fallback).string() : given;
        if (!fs::exists(p)) throw ValidationError("input file not found: " + p);
        return p;
    }
    std::ofstream create(const std::string& file) {
        artifacts.push_back(file);
        std::ofstream f(path(file), std::ios::binary);
        if (!f) throw Error("cannot write " + path(file).string());
        return f;
    }
};

std::string require_path(const std::string& value, const char* field) {
    if (value.empty()) throw ValidationError(std::string(field) + ": required for this stage");
    if (!fs::exists(value)) throw ValidationError(std::string(field) + ": file not found: " + value);
    return value;
}

Corpus load_inputs(const RunConfig& cfg) {
    const auto kw = read_keywords_file(require_path(cfg.keywords, "keywords"));
    return load_corpus(require_path(cfg.corpus, "corpus"), kw);
}

WalkConfig walk_config(const RunConfig& c) {
    WalkConfig w;
    w.alpha = c.alpha;
    w.walk_length = c.walk_length;
    w.walks_per_start = c.walks_per_start;
    w.window = c.window;
    w.seed = c.seed;
    w.exclude_self = c.exclude_self;
    w.workers = c.workers;
    return w;
}

SkipgramConfig skipgram_config(const RunConfig& c) {
    SkipgramConfig s;
    s.dim = c.dim;
    s.epochs = c.epochs;
    s.lr = c.lr;
    s.negatives = c.negatives;
    s.seed = derive_seed(c.seed, 0x736b6970);
    return s;
}

CosineMode cosine_mode(const RunConfig& c) {
    return c.cosine == "hidden_hidden" ? CosineMode::HiddenHidden : CosineMode::OutputHidden;
}

Hypergraph graph_from(const Stage& s) {
    std::ifstream in(s.input(s.args.graph, "hypergraph.json"));
    return load_hypergraph(in);
}

std::set<std::string> material_labels(const Hypergraph& h) {
    std::set<std::string> out;
    for (NodeId v : h.nodes_of_kind(NodeKind::Material)) out.insert(h.node(v).label);
    return out;
}

std::string property_label(const Hypergraph& h) {
    const auto p = h.property_node();
    if (!p) throw DomainError("the graph has no property node");
    return h.node(*p).label;
}

// Geometric and harmonic means need positive inputs; cosines are mapped to (1 + cos) / 2.
ScoreTable positive_plausibility(const ScoreTable& t) {
    if (t.provenance != Provenance::Plausibility) return t;
    ScoreTable out = t;
    for (auto& [_, v] : out.values) v = 0.5 * (1.0 + v);
    out.metadata["transform"] = "(1+cos)/2";
    return out;
}

ScoreTable prepare_s1(const ScoreTable& t) { return t.provenance == Provenance::SpD ? apply_sentinel(t) : t; }

std::pair<ScoreTable, ScoreTable> common_candidates(const ScoreTable& a, const ScoreTable& b) {
    std::set<std::string> both;
    for (const auto& [c, _] : a.values) {
        if (b.values.count(c)) both.insert(c);
    }
    return {restrict_to(a, both), restrict_to(b, both)};
}

void write_fused_csv(std::ostream& out, const ScoreTable& s1, const ScoreTable& s2, const ScoreTable& fused, double beta,
                     const std::string& method) {
    out << "candidate,s1,s2,fused,beta,method\n";
    for (const auto& [c, v] : fused.values)
        out << csv_field(c) << ',' << format_double(s1.at(c)) << ',' << format_double(s2.at(c)) << ',' << format_double(v) << ','
            << format_double(beta) << ',' << method << '\n';
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---- stages ----

void run_ingest(Stage& s) {
    const Corpus c = load_inputs(s.cfg);
    {
        auto f = s.create("corpus.jsonl");
        write_corpus(f, c);
    }
    std::set<std::string> entities;
    for (const auto& r : c.records) entities.insert(r.entities.begin(), r.entities.end());
    const auto [lo, hi] = c.year_range();
    json j{{"records", c.size()},
           {"first_year", lo},
           {"last_year", hi},
           {"entities", entities.size()},
           {"property", c.keywords.label()},
           {"keywords", c.keywords.words()},
           {"config_hash", s.hash},
           {"seed", s.cfg.seed}};
    auto f = s.create("ingest.json");
    write_json(f, j);
    *s.out << "ingested " << c.size() << " records (" << lo << "-" << hi << ")\n";
}

void run_graph(Stage& s) {
    const Corpus c = load_inputs(s.cfg);
    BuildOptions opt;
    opt.min_edge_size = s.cfg.min_edge_size;
    const Hypergraph h = build_hypergraph(s.args.all_years ? c : partition_by_year(c, s.cfg.t).before, opt);
    auto f = s.create("hypergraph.json");
    save_hypergraph(f, h);
    *s.out << "hypergraph: " << h.node_count() << " nodes, " << h.edge_count() << " hyperedges, "
           << h.skipped_records << " records skipped\n";
}

void run_transition(Stage& s) {
    const Hypergraph h = graph_from(s);
    TransitionOptions opt;
    opt.exclude_self = s.cfg.exclude_self;
    const auto P = transition_matrix(h, opt);
    {
        auto f = s.create("transition.mtx");
        P.matrix.write_coordinate(f);
    }
    const auto p = h.property_node();
    if (!p) throw DomainError("transition: the graph has no property node");
    const auto row = author_mediated_row(P, *p, s.cfg.transition_steps);
    ScoreTable t;
    t.provenance = Provenance::Transition;
    for (NodeId v : h.nodes_of_kind(NodeKind::Material)) t.values[h.node(v).label] = row[v];
    auto f = s.create("author_mediated.csv");
    write_score_csv(f, t);
}

void run_walk(Stage& s) {
    const Hypergraph h = graph_from(s);
    const auto wc = generate_walks(h, walk_config(s.cfg));
    auto f = s.create("walks.txt");
    write_walks(f, wc, h);
    *s.out << "walks: " << wc.sequences.size() << " sequences\n";
}

void run_embed(Stage& s) {
    std::ifstream in(s.input(s.args.walks, "walks.txt"));
    const auto seqs = read_token_sequences(in);
    const Hypergraph h = graph_from(s);
    const auto res = embed_sequences(seqs, s.cfg.window, skipgram_config(s.cfg));
    {
        auto hidden = s.create("hidden.vec");
        auto output = s.create("output.vec");
        save_embedding(res.table, hidden, output);
    }
    {
        auto f = s.create("embed_loss.csv");
        f << "epoch,monitor_loss,train_loss\n0," << format_double(res.initial_loss) << ",\n";
        for (std::size_t e = 0; e < res.epoch_loss.size(); ++e)
            f << e + 1 << ',' << format_double(res.epoch_loss[e]) << ',' << format_double(res.epoch_mean_loss[e]) << '\n';
    }
    auto f = s.create("plausibility.csv");
    write_score_csv(f, plausibility_table(res.table, property_label(h), material_labels(h), cosine_mode(s.cfg)));
}

void run_sppmi(Stage& s) {
    std::ifstream in(s.input(s.args.walks, "walks.txt"));
    const auto seqs = read_token_sequences(in);
    std::vector<std::string> vocab;
    std::unordered_map<std::string, NodeId> id;
    auto index = [&](const std::vector<std::vector<std::string>>& src, bool grow) {
        std::vector<std::vector<NodeId>> out;
        for (const auto& seq : src) {
            std::vector<NodeId> ids;
            for (const auto& tok : seq) {
                auto it = id.find(tok);
                if (it == id.end()) {
                    if (!grow) continue;
                    it = id.emplace(tok, static_cast<NodeId>(vocab.size())).first;
                    vocab.push_back(tok);
                }
                ids.push_back(it->second);
            }
            out.push_back(std::move(ids));
        }
        return out;
    };
    const auto main_ids = index(seqs, true);
    const std::size_t n = vocab.size();
    SparseMatrix dw;
    std::size_t dw_vocab = 0;
    if (!s.args.dw_walks.empty()) {
        std::ifstream dw_in(s.input(s.args.dw_walks, ""));
        const auto dw_seqs = read_token_sequences(dw_in);
        std::set<std::string> distinct;
        for (const auto& q : dw_seqs) distinct.insert(q.begin(), q.end());
        dw_vocab = distinct.size();
        dw = count_pairs(window_pairs(index(dw_seqs, false), s.cfg.window), n);
    } else if (s.cfg.sppmi_alpha != 0.0) {
        throw ValidationError("sppmi_alpha: nonzero mixing needs --dw-walks");
    }
    const auto spec = make_sppmi_spec(count_pairs(window_pairs(main_ids, s.cfg.window), n), std::move(dw), dw_vocab,
                                      s.cfg.sppmi_shift, s.cfg.sppmi_alpha);
    {
        auto f = s.create("sppmi.mtx");
        build_sppmi(spec).write_coordinate(f);
    }
    auto f = s.create("sppmi_vocab.txt");
    for (const auto& tok : vocab) f << tok << '\n';
}

std::map<std::string, SdSeries> sd_series(const Corpus& before, const AuthorIndex& index,
                                          const std::set<std::string>& candidates, const RunConfig& cfg) {
    const std::set<std::string> property(before.keywords.words().begin(), before.keywords.words().end());
    SdOptions opt;
    opt.true_jaccard = cfg.sd_true_jaccard;
    std::map<std::string, SdSeries> series;
    for (const auto& c : candidates) series[c] = yearwise_sd(index, {c}, property, cfg.t, cfg.gamma, opt);
    return series;
}

ScoreTable sd_scores(const Corpus& before, const std::set<std::string>& candidates, const RunConfig& cfg) {
    const AuthorIndex index(before);
    const auto series = sd_series(before, index, candidates, cfg);
    const SdMethod method = parse_sd_method(cfg.sd_method);
    SdScoreParams params;
    params.k = cfg.k;
    params.seed = derive_seed(cfg.seed, 0x7364);
    SdClassifier clf;
    if (method == SdMethod::Class) {
        SdOptions opt;
        opt.true_jaccard = cfg.sd_true_jaccard;
        const std::vector<std::string> neg(candidates.begin(), candidates.end());
        const auto set = build_sd_training_set(before, index, neg, cfg.t, cfg.gamma, cfg.sd_window, opt);
        clf = train_sd_classifier(set.features, set.labels);
        params.classifier = &clf;
    }
    auto t = sd_score(series, method, params);
    t.metadata["gamma"] = std::to_string(cfg.gamma);
    return t;
}

void run_sd(Stage& s) {
    const Corpus c = load_inputs(s.cfg);
    const auto before = partition_by_year(c, s.cfg.t).before;
    const auto t = sd_scores(before, unstudied_set(before, s.cfg.min_count), s.cfg);
    auto f = s.create("sd.csv");
    write_score_csv(f, t);
}

void run_spd(Stage& s) {
    const Hypergraph h = graph_from(s);
    auto f = s.create("spd.csv");
    write_score_csv(f, spd_table(h));
}

ScoreTable load_table(const Stage& s, const std::string& given, const std::string& fallback, const std::string& kind) {
    return load_score_csv(s.input(given, fallback), parse_provenance(kind));
}

void run_fuse(Stage& s) {
    const FusionMethod m = parse_fusion(s.cfg.fusion);
    auto [a, b] = common_candidates(load_table(s, s.args.s1, "spd.csv", s.args.s1_kind),
                                    load_table(s, s.args.s2, "plausibility.csv", s.args.s2_kind));
    ScoreTable s1 = prepare_s1(a);
    ScoreTable s2 = (m == FusionMethod::Geometric || m == FusionMethod::Harmonic) ? positive_plausibility(b) : b;
    const auto fused = combine_scores(s1, s2, s.cfg.beta, m);
    auto f = s.create("fused.csv");
    write_fused_csv(f, s1, s2, fused, s.cfg.beta, s.cfg.fusion);
}

void run_predict(Stage& s) {
    const FusionMethod m = parse_fusion(s.cfg.fusion);
    const Corpus c = load_inputs(s.cfg);
    const auto before = partition_by_year(c, s.cfg.t).before;
    BuildOptions opt;
    opt.min_edge_size = s.cfg.min_edge_size;
    const Hypergraph h = build_hypergraph(before, opt);
    std::set<std::string> candidates;
    const auto materials = material_labels(h);
    for (const auto& u : unstudied_set(before, s.cfg.min_count)) {
        if (materials.count(u)) candidates.insert(u);
    }
    if (candidates.empty()) throw DomainError("predict: no unstudied candidates before t = " + std::to_string(s.cfg.t));

    auto plausibility = [&] {
        if (!s.args.s2.empty() && m != FusionMethod::LinearLambda)
            return restrict_to(load_table(s, s.args.s2, "", s.args.s2_kind), candidates);
        const auto res = embed_sequences(walk_tokens(h, walk_config(s.cfg)), s.cfg.window, skipgram_config(s.cfg));
        return plausibility_table(res.table, property_label(h), candidates, cosine_mode(s.cfg));
    };
    ScoreTable s1, s2;
    if (m == FusionMethod::LinearLambda) {
        s1 = plausibility();
        RunConfig sum_cfg = s.cfg;
        sum_cfg.sd_method = "sum";
        s2 = sd_scores(before, candidates, sum_cfg);
    } else {
        s1 = restrict_to(s.args.s1.empty() ? spd_table(h) : load_table(s, s.args.s1, "", s.args.s1_kind), candidates);
        s1 = prepare_s1(s1);
        s2 = plausibility();
        if (m != FusionMethod::VdwZ) s2 = positive_plausibility(s2);
    }
    std::tie(s1, s2) = common_candidates(s1, s2);
    const auto fused = combine_scores(s1, s2, s.cfg.beta, m);
    PredictionReport r;
    r.t = s.cfg.t;
    r.k = s.cfg.k;
    r.predictions = rank_candidates(fused, s.cfg.k).candidates;
    r.candidate_count = candidates.size();
    r.metadata = fused.metadata;
    r.metadata["config_hash"] = s.hash;
    r.metadata["seed"] = std::to_string(s.cfg.seed);
    auto f = s.create("prediction.json");
    write_report_json(f, r);
    *s.out << "predicted " << r.predictions.size() << " of " << candidates.size() << " candidates\n";
}

void run_evaluate(Stage& s) {
    PredictionReport r;
    {
        std::ifstream in(s.input(s.args.report, "prediction.json"));
        r = read_report_json(in);
    }
    const Corpus c = load_inputs(s.cfg);
    const auto part = partition_by_year(c, r.t);
    HitRateOptions opt;
    opt.normalize_by_predictions = s.cfg.normalize_by == "predictions";
    r = cumulative_hit_rate(r, unstudied_set(part.before, s.cfg.min_count), part.from, opt);
    r.metadata["config_hash"] = s.hash;
    r.metadata["seed"] = std::to_string(s.cfg.seed);
    {
        auto f = s.create("evaluation.json");
        write_report_json(f, r);
    }
    auto f = s.create("cumulative.csv");
    f << "year,hit_rate,cumulative\n";
    for (std::size_t i = 0; i < r.years.size(); ++i)
        f << r.years[i] << ',' << format_double(r.hit_rates[i]) << ',' << format_double(r.cumulative[i]) << '\n';
    if (!r.cumulative.empty()) *s.out << "cumulative accuracy: " << format_double(r.cumulative.back()) << '\n';
}

void run_sweep(Stage& s) {
    std::vector<FusionMethod> methods;
    std::stringstream ms(s.args.methods);
    for (std::string name; std::getline(ms, name, ',');) {
        if (!name.empty()) methods.push_back(parse_fusion(name));
    }
    ScoreTable spd, s2;
    if (s.args.benchmark > 0) {
        auto b = make_anticorrelated_benchmark(s.args.benchmark, s.cfg.seed);
        spd = std::move(b.spd);
        s2 = std::move(b.s2);
    } else {
        std::tie(spd, s2) = common_candidates(load_table(s, s.args.spd, "spd.csv", "sp_d"),
                                              positive_plausibility(load_table(s, s.args.s2, "plausibility.csv",
                                                                               s.args.s2_kind)));
    }
    const auto rows = beta_sweep_self_eval(spd, s2, s.cfg.beta_grid, s.cfg.k, methods, s.cfg.workers);
    auto f = s.create("sweep.csv");
    write_sweep_csv(f, rows);
}

void run_gnn(Stage& s) {
    const Hypergraph h = graph_from(s);
    const GnnGraph g = make_gnn_graph(h, s.cfg.gnn.setting);
    const auto pairs = gnn_positive_pairs(h, g, s.cfg.gnn.setting, walk_config(s.cfg));
    const auto res = train_autoencoder(g, pairs, s.cfg.gnn);
    {
        auto f = s.create("gnn_checkpoint.txt");
        save_checkpoint(f, s.cfg.gnn, res.params);
    }
    {
        auto f = s.create("gnn_embeddings.vec");
        write_vectors(f, g.labels, res.embeddings);
    }
    auto f = s.create("gnn_loss.csv");
    f << "step,loss\n";
    for (std::size_t i = 0; i < res.loss_trace.size(); ++i) f << i << ',' << format_double(res.loss_trace[i]) << '\n';
    *s.out << "gnn: " << res.steps << " steps, " << pairs.size() << " positive pairs\n";
}

const std::map<std::string, void (*)(Stage&)>& stages() {
    static const std::map<std::string, void (*)(Stage&)> table{
        {"ingest", run_ingest}, {"graph", run_graph},     {"transition", run_transition}, {"walk", run_walk},
        {"embed", run_embed},   {"sppmi", run_sppmi},     {"sd", run_sd},                 {"spd", run_spd},
        {"fuse", run_fuse},     {"predict", run_predict}, {"evaluate", run_evaluate},     {"sweep-beta", run_sweep},
        {"gnn-train", run_gnn}};
    return table;
}

const char* stage_help(const std::string& name) {
    static const std::map<std::string, const char*> help{
        {"ingest", "validate a JSON Lines corpus and write a normalized copy"},
        {"graph", "build the hypergraph snapshot from records before t"},
        {"transition", "transition matrix and author-mediated scores from the property node"},
        {"walk", "alpha-biased hypergraph random walks"},
        {"embed", "skipgram embedding of the walks and plausibility scores"},
        {"sppmi", "(modified) SPPMI matrix from walk co-occurrences"},
        {"sd", "social-density scores of the unstudied candidates"},
        {"spd", "shortest-path distances from the property node"},
        {"fuse", "combine two score tables at one beta"},
        {"predict", "top-k prediction of unstudied candidates at year t"},
        {"evaluate", "per-year and cumulative hit rates of a prediction"},
        {"sweep-beta", "beta sweep self-evaluation table"},
        {"gnn-train", "train the graph autoencoder"}};
    return help.at(name);
}

int fail(std::ostream& err, const std::exception& e, int code) {
    err << "error: " << e.what() << '\n';
    return code;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hypergraph random-walk discovery prediction", "aai"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;  // in command-line order
    auto flag = [&](CLI::App* target, const std::string& name, const std::string& key, const std::string& help) {
        target->add_option_function<std::string>(
            name, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
    };
    app.add_option("--config", config_path, "JSON config file");
    flag(&app, "--seed", "seed", "random seed");
    flag(&app, "--workers", "workers", "worker threads");
    flag(&app, "--out", "out_dir", "output directory");
    app.add_option_function<std::vector<std::string>>(
        "--set",
        [&overrides](const std::vector<std::string>& kvs) {
            for (const auto& kv : kvs) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + kv);
                overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
        },
        "override any config key (key=value)");

    StageArgs sa;
    std::string chosen;
    for (const auto& [name, _] : stages()) {
        auto* sub = app.add_subcommand(name, stage_help(name));
        sub->fallthrough();
        sub->callback([&chosen, name = name] { chosen = name; });
        flag(sub, "--corpus", "corpus", "JSON Lines corpus");
        flag(sub, "--keywords", "keywords", "property keyword file");
        flag(sub, "--t", "t", "prediction year");
        flag(sub, "--k", "k", "prediction size");
        flag(sub, "--gamma", "gamma", "SD memory in years");
        flag(sub, "--alpha", "alpha", "walk bias (number or inf)");
        flag(sub, "--beta", "beta", "fusion weight in [0, 1]");
        flag(sub, "--method", "fusion", "vdw_z, geometric, harmonic or linear_lambda");
        flag(sub, "--setting", "gnn_setting", "full or author_less");
        flag(sub, "--steps", "gnn_max_steps", "GNN step limit");
        sub->add_option("--graph", sa.graph, "hypergraph snapshot (default <out>/hypergraph.json)");
        sub->add_option("--walks", sa.walks, "walk file (default <out>/walks.txt)");
        sub->add_option("--dw-walks", sa.dw_walks, "deepwalk walk file for the modified SPPMI");
        sub->add_option("--s1", sa.s1, "first score table");
        sub->add_option("--s2", sa.s2, "second score table");
        sub->add_option("--s1-kind", sa.s1_kind, "provenance of --s1");
        sub->add_option("--s2-kind", sa.s2_kind, "provenance of --s2");
        sub->add_option("--spd", sa.spd, "SP-d table (default <out>/spd.csv)");
        sub->add_option("--report", sa.report, "prediction report (default <out>/prediction.json)");
        sub->add_option("--methods", sa.methods, "comma-separated fusion methods for the sweep");
        sub->add_option("--benchmark", sa.benchmark, "sweep the synthetic benchmark with this many candidates");
        sub->add_flag("--all-years", sa.all_years, "build the graph from every record");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        RunConfig cfg = default_run_config();
        if (config_path.empty()) {
            if (const char* env = std::getenv("AAI_CONFIG")) config_path = env;
        }
        if (!config_path.empty()) cfg = validate_config(config_path);
        cfg = apply_env_overrides(cfg, [](const char* k) -> const char* { return std::getenv(k); });
        for (const auto& [key, value] : overrides) cfg = apply_override(cfg, key, value);
        cfg.validate();

        Stage s{chosen, cfg, sa, config_hash(cfg), {}, &out};
        fs::create_directories(cfg.out_dir);
        {
            std::ofstream echo(s.path(chosen + ".config.json"), std::ios::binary);
            echo << config_to_json(cfg) << '\n';
        }
        stages().at(chosen)(s);
        json manifest{{"stage", chosen}, {"config_hash", s.hash}, {"seed", cfg.seed}, {"artifacts", s.artifacts}};
        std::ofstream mf(s.path(chosen + ".manifest.json"), std::ios::binary);
        write_json(mf, manifest);
        return 0;
    } catch (const ParseError& e) {
        return fail(err, e, 1);
    } catch (const ValidationError& e) {
        return fail(err, e, 1);
    } catch (const ConfigError& e) {
        return fail(err, e, 1);
    } catch (const std::exception& e) {
        return fail(err, e, 2);
    }
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace aai
