#include "aai/gnn.hpp"

#include "aai/error.hpp"
#include "aai/score_table.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace aai {

namespace {

constexpr std::uint32_t kNpos = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kStructuralFeatures = 4;

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

// -log s(x)
double neg_log_sigmoid(double x) { return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

}  // namespace

std::string setting_name(GnnSetting s) { return s == GnnSetting::Full ? "full" : "author_less"; }

GnnSetting parse_setting(const std::string& name) {
    if (name == "full") return GnnSetting::Full;
    if (name == "author_less") return GnnSetting::AuthorLess;
    throw ValidationError("unknown GNN setting '" + name + "' (expected full or author_less)");
}

void GnnConfig::validate() const {
    if (layers < 1) throw ConfigError("gnn.layers must be >= 1");
    if (sample_sizes.size() != static_cast<std::size_t>(layers))
        throw ConfigError("gnn.sample_sizes must have one entry per layer");
    for (int k : sample_sizes) {
        if (k < 1) throw ConfigError("gnn.sample_sizes entries must be >= 1");
    }
    if (dims.size() != static_cast<std::size_t>(layers) + 1)
        throw ConfigError("gnn.dims must have layers + 1 entries");
    for (int d : dims) {
        if (d < 1) throw ConfigError("gnn.dims entries must be >= 1");
    }
    if (!trainable_inputs && dims[0] < static_cast<int>(kStructuralFeatures))
        throw ConfigError("gnn.dims[0] must be >= 4 for structural input features");
    if (batch_size < 1) throw ConfigError("gnn.batch_size must be >= 1");
    if (negatives < 0) throw ConfigError("gnn.negatives must be >= 0");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("gnn.lr must be > 0");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw ConfigError("gnn.adam_beta1 must lie in [0, 1)");
    if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw ConfigError("gnn.adam_beta2 must lie in [0, 1)");
    if (!(adam_eps > 0.0)) throw ConfigError("gnn.adam_eps must be > 0");
    if (!(init_scale >= 0.0)) throw ConfigError("gnn.init_scale must be >= 0");
    if (epochs < 1) throw ConfigError("gnn.epochs must be >= 1");
    if (!(divergence_factor > 1.0)) throw ConfigError("gnn.divergence_factor must be > 1");
}

std::uint32_t GnnGraph::local(NodeId global_id) const {
    auto it = std::lower_bound(global.begin(), global.end(), global_id);
    if (it == global.end() || *it != global_id) throw LookupError("node is not part of the GNN graph");
    return static_cast<std::uint32_t>(it - global.begin());
}

GnnGraph make_gnn_graph(const Hypergraph& h, const Adjacency& adj) {
    GnnGraph g;
    std::vector<std::uint32_t> to_local(h.node_count(), kNpos);
    for (NodeId v = 0; v < h.node_count(); ++v) {
        if (v < adj.kept.size() && adj.kept[v]) {
            to_local[v] = static_cast<std::uint32_t>(g.global.size());
            g.global.push_back(v);
        }
    }
    g.nbrs.resize(g.global.size());
    for (std::size_t i = 0; i < g.global.size(); ++i) {
        const NodeId v = g.global[i];
        g.labels.push_back(h.node(v).label);
        g.kind.push_back(h.node(v).kind == NodeKind::Property ? 1 : 0);
        for (NodeId u : adj.nbrs[v]) {
            if (to_local[u] != kNpos) g.nbrs[i].push_back(to_local[u]);
        }
        g.degree_feature.push_back(std::log1p(static_cast<double>(g.nbrs[i].size())));
    }
    return g;
}

GnnGraph make_gnn_graph(const Hypergraph& h, GnnSetting setting) {
    return make_gnn_graph(h, projected_adjacency(h, {NodeKind::Material, NodeKind::Property},
                                                 setting == GnnSetting::Full));
}

GnnParams init_gnn_params(const GnnGraph& g, const GnnConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, 0x676e6e));
    GnnParams p;
    for (int l = 0; l < cfg.layers; ++l) {
        const int fan_in = cfg.dims[l], fan_out = cfg.dims[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        RowMatrix w(fan_in, fan_out);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
        p.weights.push_back(std::move(w));
    }
    p.inputs = RowMatrix::Zero(static_cast<Eigen::Index>(g.size()), cfg.dims[0]);
    if (cfg.trainable_inputs) {
        for (Eigen::Index i = 0; i < p.inputs.size(); ++i) p.inputs.data()[i] = rng.uniform(-cfg.init_scale, cfg.init_scale);
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            p.inputs(r, 0) = 1.0;
            p.inputs(r, 1) = g.degree_feature[i];
            p.inputs(r, 2) = g.kind[i] == 0 ? 1.0 : 0.0;
            p.inputs(r, 3) = g.kind[i] == 1 ? 1.0 : 0.0;
        }
    }
    return p;
}

std::vector<std::uint32_t> sample_neighborhood(const GnnGraph& g, std::uint32_t node, int k, bool include_self,
                                               Rng& rng) {
    if (node >= g.size()) throw LookupError("sample_neighborhood: node out of range");
    const auto& nb = g.nbrs[node];
    const std::size_t pool = nb.size() + (include_self ? 1 : 0);
    std::vector<std::uint32_t> out(static_cast<std::size_t>(std::max(k, 0)), node);
    if (nb.empty()) return out;
    for (auto& x : out) {
        const auto i = rng.index(pool);
        x = i < nb.size() ? nb[i] : node;
    }
    return out;
}

SampledGraph sample_computation(const GnnGraph& g, const GnnConfig& cfg, const std::vector<std::uint32_t>& targets,
                                Rng& rng) {
    const int L = cfg.layers;
    SampledGraph sg;
    sg.levels.resize(static_cast<std::size_t>(L) + 1);
    sg.samples.resize(static_cast<std::size_t>(L) + 1);
    sg.target_pos.assign(g.size(), kNpos);
    for (std::uint32_t v : targets) {
        if (v >= g.size()) throw LookupError("sample_computation: node out of range");
        if (sg.target_pos[v] == kNpos) {
            sg.target_pos[v] = static_cast<std::uint32_t>(sg.levels[L].size());
            sg.levels[L].push_back(v);
        }
    }
    std::vector<std::uint32_t> pos(g.size(), kNpos);
    for (int l = L; l >= 1; --l) {
        const int k = cfg.sample_sizes[static_cast<std::size_t>(L - l)];
        auto& below = sg.levels[l - 1];
        auto& samples = sg.samples[l];
        samples.resize(sg.levels[l].size());
        for (std::size_t i = 0; i < sg.levels[l].size(); ++i) {
            for (std::uint32_t u : sample_neighborhood(g, sg.levels[l][i], k, cfg.include_self, rng)) {
                if (pos[u] == kNpos) {
                    pos[u] = static_cast<std::uint32_t>(below.size());
                    below.push_back(u);
                }
                samples[i].push_back(pos[u]);
            }
        }
        for (std::uint32_t u : below) pos[u] = kNpos;
    }
    return sg;
}

namespace {

struct Forward {
    std::vector<RowMatrix> agg;  // agg[l]: mean of sampled h^{l-1}, l = 1..L
    std::vector<RowMatrix> pre;  // pre[l] = agg[l] W_{l-1}
    std::vector<RowMatrix> act;  // act[l] = h^l
};

void check_shapes(const GnnParams& params, const GnnConfig& cfg) {
    cfg.validate();
    if (params.weights.size() != static_cast<std::size_t>(cfg.layers))
        throw ConfigError("GNN parameters have " + std::to_string(params.weights.size()) + " layers, config expects " +
                          std::to_string(cfg.layers));
    if (params.inputs.cols() != cfg.dims[0])
        throw ConfigError("GNN inputs have " + std::to_string(params.inputs.cols()) + " columns, config expects " +
                          std::to_string(cfg.dims[0]));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const auto& W = params.weights[l];
        if (W.rows() != cfg.dims[l] || W.cols() != cfg.dims[l + 1])
            throw ConfigError("GNN weight " + std::to_string(l) + " is " + std::to_string(W.rows()) + "x" +
                              std::to_string(W.cols()) + ", config expects " + std::to_string(cfg.dims[l]) + "x" +
                              std::to_string(cfg.dims[l + 1]));
    }
}

Forward forward(const GnnParams& params, const GnnConfig& cfg, const SampledGraph& sg) {
    check_shapes(params, cfg);
    const int L = cfg.layers;
    Forward f;
    f.agg.resize(L + 1);
    f.pre.resize(L + 1);
    f.act.resize(L + 1);
    f.act[0].resize(static_cast<Eigen::Index>(sg.levels[0].size()), params.inputs.cols());
    for (std::size_t i = 0; i < sg.levels[0].size(); ++i) {
        if (sg.levels[0][i] >= params.inputs.rows()) throw ConfigError("GNN input matrix has too few rows");
        f.act[0].row(static_cast<Eigen::Index>(i)) = params.inputs.row(sg.levels[0][i]);
    }
    for (int l = 1; l <= L; ++l) {
        const auto& prev = f.act[l - 1];
        RowMatrix a = RowMatrix::Zero(static_cast<Eigen::Index>(sg.levels[l].size()), prev.cols());
        for (std::size_t i = 0; i < sg.samples[l].size(); ++i) {
            const auto& s = sg.samples[l][i];
            for (std::uint32_t j : s) a.row(static_cast<Eigen::Index>(i)) += prev.row(j);
            a.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(s.size());
        }
        f.pre[l] = a * params.weights[l - 1];
        f.act[l] = l < L ? RowMatrix(f.pre[l].cwiseMax(0.0)) : f.pre[l];
        f.agg[l] = std::move(a);
    }
    return f;
}

std::uint32_t target_row(const SampledGraph& sg, std::uint32_t v) {
    if (v >= sg.target_pos.size() || sg.target_pos[v] == kNpos)
        throw LookupError("node was not a target of the sampled computation graph");
    return sg.target_pos[v];
}

}  // namespace

RowMatrix encode(const GnnParams& params, const GnnConfig& cfg, const SampledGraph& sg,
                 const std::vector<std::uint32_t>& nodes) {
    const auto f = forward(params, cfg, sg);
    const auto& top = f.act[cfg.layers];
    RowMatrix out(static_cast<Eigen::Index>(nodes.size()), top.cols());
    for (std::size_t i = 0; i < nodes.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = top.row(target_row(sg, nodes[i]));
    return out;
}

RowMatrix encode(const GnnParams& params, const GnnConfig& cfg, const GnnGraph& g,
                 const std::vector<std::uint32_t>& nodes, Rng& rng) {
    check_shapes(params, cfg);
    return encode(params, cfg, sample_computation(g, cfg, nodes, rng), nodes);
}

std::vector<std::uint32_t> batch_nodes(const LinkBatch& batch) {
    std::vector<std::uint32_t> nodes;
    for (std::size_t i = 0; i < batch.positives.size(); ++i) {
        nodes.push_back(batch.positives[i].first);
        nodes.push_back(batch.positives[i].second);
        if (i < batch.negatives.size()) nodes.insert(nodes.end(), batch.negatives[i].begin(), batch.negatives[i].end());
    }
    return nodes;
}

GnnGradients loss_and_grad(const GnnParams& params, const GnnConfig& cfg, const SampledGraph& sg,
                           const LinkBatch& batch) {
    if (batch.positives.empty()) throw DomainError("loss_and_grad: empty batch");
    if (!batch.negatives.empty() && batch.negatives.size() != batch.positives.size())
        throw ValidationError("loss_and_grad: negatives must be given per positive pair");
    const int L = cfg.layers;
    const auto f = forward(params, cfg, sg);
    const RowMatrix& z = f.act[L];

    GnnGradients g;
    RowMatrix dz = RowMatrix::Zero(z.rows(), z.cols());
    for (std::size_t p = 0; p < batch.positives.size(); ++p) {
        const auto u = target_row(sg, batch.positives[p].first);
        const auto v = target_row(sg, batch.positives[p].second);
        const double x = z.row(u).dot(z.row(v));
        g.loss += neg_log_sigmoid(x);
        const double c = -sigmoid(-x);  // d/dx of -log s(x)
        dz.row(u) += c * z.row(v);
        dz.row(v) += c * z.row(u);
        if (batch.negatives.empty()) continue;
        for (std::uint32_t nn : batch.negatives[p]) {
            const auto n = target_row(sg, nn);
            const double y = z.row(u).dot(z.row(n));
            g.loss += neg_log_sigmoid(-y);
            const double d = sigmoid(y);  // d/dy of -log s(-y)
            dz.row(u) += d * z.row(n);
            dz.row(n) += d * z.row(u);
        }
    }

    g.weights.resize(static_cast<std::size_t>(L));
    RowMatrix grad_act = std::move(dz);
    for (int l = L; l >= 1; --l) {
        RowMatrix grad_pre = grad_act;
        if (l < L) grad_pre = grad_pre.cwiseProduct((f.pre[l].array() > 0.0).cast<double>().matrix());
        g.weights[l - 1] = f.agg[l].transpose() * grad_pre;
        const RowMatrix grad_agg = grad_pre * params.weights[l - 1].transpose();
        RowMatrix below = RowMatrix::Zero(f.act[l - 1].rows(), f.act[l - 1].cols());
        for (std::size_t i = 0; i < sg.samples[l].size(); ++i) {
            const auto& s = sg.samples[l][i];
            const double share = 1.0 / static_cast<double>(s.size());
            for (std::uint32_t j : s) below.row(j) += share * grad_agg.row(static_cast<Eigen::Index>(i));
        }
        grad_act = std::move(below);
    }
    g.inputs = RowMatrix::Zero(params.inputs.rows(), params.inputs.cols());
    if (cfg.trainable_inputs) {
        for (std::size_t i = 0; i < sg.levels[0].size(); ++i)
            g.inputs.row(sg.levels[0][i]) += grad_act.row(static_cast<Eigen::Index>(i));
    }
    return g;
}

GnnGradients loss_and_grad(const GnnParams& params, const GnnConfig& cfg, const GnnGraph& g, const LinkBatch& positives,
                           const NegativeSampler& sampler, Rng& rng) {
    LinkBatch batch;
    batch.positives = positives.positives;
    batch.negatives.resize(batch.positives.size());
    if (cfg.negatives > 0 && sampler.size() == 0) throw DomainError("loss_and_grad: empty negative sampler");
    for (auto& neg : batch.negatives) {
        for (int i = 0; i < cfg.negatives; ++i) neg.push_back(sampler.sample(rng));
    }
    const auto sg = sample_computation(g, cfg, batch_nodes(batch), rng);
    return loss_and_grad(params, cfg, sg, batch);
}

double link_score(const RowMatrix& embeddings, std::uint32_t u, std::uint32_t v) {
    return embeddings.row(u).dot(embeddings.row(v));
}

namespace {

struct Adam {
    std::vector<RowMatrix> m, v;
    std::size_t t = 0;

    void step(std::vector<RowMatrix*> params, const std::vector<const RowMatrix*>& grads, const GnnConfig& cfg) {
        if (m.empty()) {
            for (auto* p : params) {
                m.push_back(RowMatrix::Zero(p->rows(), p->cols()));
                v.push_back(RowMatrix::Zero(p->rows(), p->cols()));
            }
        }
        ++t;
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
        for (std::size_t b = 0; b < params.size(); ++b) {
            m[b] = cfg.adam_beta1 * m[b] + (1.0 - cfg.adam_beta1) * *grads[b];
            v[b] = cfg.adam_beta2 * v[b] + (1.0 - cfg.adam_beta2) * grads[b]->cwiseProduct(*grads[b]);
            params[b]->array() -=
                cfg.lr * (m[b].array() / c1) / ((v[b].array() / c2).sqrt() + cfg.adam_eps);
        }
    }
};

std::string trace_text(const std::vector<double>& trace) {
    std::ostringstream s;
    for (std::size_t i = 0; i < trace.size(); ++i) s << (i ? " " : "") << trace[i];
    return s.str();
}

}  // namespace

GnnResult train_autoencoder(const GnnGraph& g, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                            const GnnConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw DomainError("train_autoencoder: no positive pairs");
    for (const auto& [u, v] : pairs) {
        if (u >= g.size() || v >= g.size()) throw LookupError("train_autoencoder: pair node out of range");
    }
    std::vector<double> freq(g.size(), 0.0);
    for (const auto& [u, v] : pairs) {
        freq[u] += 1.0;
        freq[v] += 1.0;
    }
    const auto sampler = build_negative_sampler(freq);

    GnnResult res;
    res.params = init_gnn_params(g, cfg);
    Adam adam;
    Rng rng(derive_seed(cfg.seed, 0x747261696e));
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);

    double initial = 0.0;
    bool done = false;
    for (int epoch = 0; epoch < cfg.epochs && !done; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        for (std::size_t start = 0; start < order.size() && !done; start += cfg.batch_size) {
            LinkBatch batch;
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            for (std::size_t i = start; i < end; ++i) batch.positives.push_back(pairs[order[i]]);
            const auto grad = loss_and_grad(res.params, cfg, g, batch, sampler, rng);
            const double mean = grad.loss / static_cast<double>(batch.positives.size());
            res.loss_trace.push_back(mean);
            if (!std::isfinite(mean)) throw TrainingError("GNN loss is not finite; trace: " + trace_text(res.loss_trace));
            if (res.steps == 0) initial = mean;
            if (mean > cfg.divergence_factor * initial)
                throw TrainingError("GNN training diverged (loss above " + format_double(cfg.divergence_factor) +
                                    "x initial); trace: " + trace_text(res.loss_trace));
            std::vector<RowMatrix*> params;
            std::vector<const RowMatrix*> grads;
            for (std::size_t l = 0; l < res.params.weights.size(); ++l) {
                params.push_back(&res.params.weights[l]);
                grads.push_back(&grad.weights[l]);
            }
            if (cfg.trainable_inputs) {
                params.push_back(&res.params.inputs);
                grads.push_back(&grad.inputs);
            }
            adam.step(params, grads, cfg);
            ++res.steps;
            if (cfg.max_steps && res.steps >= cfg.max_steps) done = true;
        }
    }

    std::vector<std::uint32_t> all(g.size());
    std::iota(all.begin(), all.end(), 0u);
    Rng final_rng(derive_seed(cfg.seed, 0x656e636f6465));
    res.embeddings = encode(res.params, cfg, g, all, final_rng);
    return res;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> gnn_positive_pairs(const Hypergraph& h, const GnnGraph& g,
                                                                          GnnSetting setting, WalkConfig walk) {
    walk.alpha = setting == GnnSetting::Full ? 1.0 : kInfiniteAlpha;
    const auto wc = generate_walks(h, walk);
    const auto pairs = window_pairs(wc, walk.window, /*drop_authors=*/true, h);
    std::vector<std::uint32_t> to_local(h.node_count(), kNpos);
    for (std::size_t i = 0; i < g.global.size(); ++i) to_local[g.global[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        if (to_local[a] != kNpos && to_local[b] != kNpos) out.emplace_back(to_local[a], to_local[b]);
    }
    return out;
}

namespace {

nlohmann::json config_to_json(const GnnConfig& c) {
    return nlohmann::json{{"layers", c.layers},
                          {"sample_sizes", c.sample_sizes},
                          {"dims", c.dims},
                          {"batch_size", c.batch_size},
                          {"negatives", c.negatives},
                          {"lr", c.lr},
                          {"adam_beta1", c.adam_beta1},
                          {"adam_beta2", c.adam_beta2},
                          {"adam_eps", c.adam_eps},
                          {"seed", c.seed},
                          {"setting", setting_name(c.setting)},
                          {"include_self", c.include_self},
                          {"trainable_inputs", c.trainable_inputs},
                          {"init_scale", c.init_scale},
                          {"epochs", c.epochs},
                          {"max_steps", c.max_steps},
                          {"divergence_factor", c.divergence_factor}};
}

GnnConfig config_from_json(const nlohmann::json& j) {
    GnnConfig c;
    c.layers = j.at("layers").get<int>();
    c.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    c.dims = j.at("dims").get<std::vector<int>>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.negatives = j.at("negatives").get<int>();
    c.lr = j.at("lr").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_eps = j.at("adam_eps").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.setting = parse_setting(j.at("setting").get<std::string>());
    c.include_self = j.at("include_self").get<bool>();
    c.trainable_inputs = j.at("trainable_inputs").get<bool>();
    c.init_scale = j.at("init_scale").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.max_steps = j.at("max_steps").get<std::size_t>();
    c.divergence_factor = j.at("divergence_factor").get<double>();
    return c;
}

void write_block(std::ostream& out, const std::string& name, const RowMatrix& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.size(); ++i) out << (i ? " " : "") << format_double(m.data()[i]);
    out << '\n';
}

RowMatrix read_block(std::istream& in, const std::string& expected, std::size_t& line) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError("checkpoint truncated before block '" + expected + "'", line + 1);
    ++line;
    std::istringstream hs(header);
    std::string name;
    Eigen::Index rows = -1, cols = -1;
    if (!(hs >> name >> rows >> cols) || name != expected || rows < 0 || cols < 0)
        throw ParseError("expected block header '" + expected + " <rows> <cols>'", line);
    std::string body;
    std::getline(in, body);
    ++line;
    std::istringstream bs(body);
    RowMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        std::string tok;
        if (!(bs >> tok)) throw ParseError("block '" + expected + "' has too few values", line);
        try {
            m.data()[i] = std::stod(tok);
        } catch (const std::exception&) {
            throw ParseError("bad number '" + tok + "' in block '" + expected + "'", line);
        }
    }
    std::string extra;
    if (bs >> extra) throw ParseError("block '" + expected + "' has too many values", line);
    return m;
}

}  // namespace

std::string gnn_config_json(const GnnConfig& cfg) { return config_to_json(cfg).dump(); }

void save_checkpoint(std::ostream& out, const GnnConfig& cfg, const GnnParams& params) {
    check_shapes(params, cfg);
    nlohmann::json header{{"format", "aai-gnn-checkpoint"}, {"version", 1}, {"config", config_to_json(cfg)}};
    out << header.dump() << '\n';
    for (std::size_t l = 0; l < params.weights.size(); ++l) write_block(out, "W" + std::to_string(l), params.weights[l]);
    write_block(out, "H0", params.inputs);
}

std::pair<GnnConfig, GnnParams> load_checkpoint(std::istream& in) {
    std::string first;
    if (!std::getline(in, first)) throw ParseError("empty checkpoint", 1);
    std::size_t line = 1;
    GnnConfig cfg;
    try {
        const auto j = nlohmann::json::parse(first);
        if (j.at("format") != "aai-gnn-checkpoint") throw ParseError("not a GNN checkpoint", 1);
        if (j.at("version") != 1) throw ParseError("unsupported checkpoint version", 1);
        cfg = config_from_json(j.at("config"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad checkpoint header: ") + e.what(), 1);
    }
    cfg.validate();
    GnnParams p;
    for (int l = 0; l < cfg.layers; ++l) p.weights.push_back(read_block(in, "W" + std::to_string(l), line));
    p.inputs = read_block(in, "H0", line);
    check_shapes(p, cfg);
    return {cfg, p};
}

}  // namespace aai
