#include "aai/embedding.hpp"

#include "aai/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace aai {

namespace {

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }
double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocabulary, int dim)
    : tokens(std::move(vocabulary)),
      hidden(RowMatrix::Zero(static_cast<Eigen::Index>(tokens.size()), dim)),
      output(RowMatrix::Zero(static_cast<Eigen::Index>(tokens.size()), dim)) {
    for (std::uint32_t i = 0; i < tokens.size(); ++i) {
        if (!index.emplace(tokens[i], i).second) throw ValidationError("duplicate token '" + tokens[i] + "'");
    }
}

std::uint32_t EmbeddingTable::lookup(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) throw LookupError("token not in vocabulary: '" + token + "'");
    return it->second;
}

EmbeddingTable init_embedding(std::vector<std::string> vocabulary, int dim, std::uint64_t seed) {
    if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
    EmbeddingTable E(std::move(vocabulary), dim);
    Rng rng(seed);
    const double half = 0.5 / dim;
    for (Eigen::Index i = 0; i < E.hidden.size(); ++i) E.hidden.data()[i] = rng.uniform(-half, half);
    return E;
}

double pair_loss(const EmbeddingTable& E, std::uint32_t center, std::uint32_t context,
                 const std::vector<std::uint32_t>& negatives) {
    const auto h = E.hidden.row(center);
    double loss = -log_sigmoid(E.output.row(context).dot(h));
    for (auto n : negatives) loss -= log_sigmoid(-E.output.row(n).dot(h));
    return loss;
}

PairGradient pair_loss_gradient(const EmbeddingTable& E, std::uint32_t center, std::uint32_t context,
                                const std::vector<std::uint32_t>& negatives) {
    PairGradient g;
    const Eigen::VectorXd h = E.hidden.row(center).transpose();
    g.hidden = Eigen::VectorXd::Zero(h.size());
    auto add = [&](std::uint32_t row, double label) {
        const Eigen::VectorXd o = E.output.row(row).transpose();
        // d/dx of -log s(x) is s(x) - 1; of -log s(-x) is s(x).
        const double coeff = sigmoid(o.dot(h)) - label;
        g.hidden += coeff * o;
        g.output_rows.push_back(row);
        g.output.push_back(coeff * h);
    };
    add(context, 1.0);
    for (auto n : negatives) add(n, 0.0);
    return g;
}

SkipgramResult train_skipgram(std::vector<std::string> vocabulary, const std::vector<SkipPair>& pairs,
                              const NegativeSampler& negatives, const SkipgramConfig& cfg) {
    if (pairs.empty()) throw DomainError("train_skipgram: no training pairs");
    if (cfg.epochs < 0 || cfg.negatives < 0 || !(cfg.lr > 0.0))
        throw ValidationError("train_skipgram: invalid configuration");
    const std::size_t vocab_size = vocabulary.size();
    if (negatives.size() != vocab_size) throw ValidationError("negative sampler size != vocabulary size");
    for (const auto& p : pairs) {
        if (p.center >= vocab_size || p.context >= vocab_size) throw ValidationError("pair index out of range");
    }

    SkipgramResult result;
    result.table = init_embedding(std::move(vocabulary), cfg.dim, cfg.seed);
    auto& E = result.table;
    Rng rng(derive_seed(cfg.seed, 0x736b6970));

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    // Monitor set: withheld pairs, or a fixed sample of training pairs.
    std::size_t holdout = static_cast<std::size_t>(cfg.holdout_fraction * static_cast<double>(pairs.size()));
    holdout = std::min(holdout, pairs.size() - 1);
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(holdout), order.end());
    std::vector<std::size_t> monitor_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout));
    if (monitor_idx.empty()) monitor_idx.assign(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(std::min(cfg.monitor_pairs, train.size())));
    if (monitor_idx.size() > cfg.monitor_pairs) monitor_idx.resize(cfg.monitor_pairs);

    struct Monitor {
        std::uint32_t center, context;
        std::vector<std::uint32_t> negs;
    };
    std::vector<Monitor> monitor;
    for (auto i : monitor_idx) {
        Monitor m{pairs[i].center, pairs[i].context, {}};
        for (int k = 0; k < cfg.negatives; ++k) m.negs.push_back(negatives.sample(rng));
        monitor.push_back(std::move(m));
    }
    auto monitor_loss = [&] {
        double total = 0.0;
        for (const auto& m : monitor) total += pair_loss(E, m.center, m.context, m.negs);
        return total / static_cast<double>(monitor.size());
    };
    result.initial_loss = monitor_loss();

    const double total_steps = static_cast<double>(train.size()) * std::max(cfg.epochs, 1);
    std::size_t step = 0;
    Eigen::VectorXd grad_h(cfg.dim);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_total = 0.0;
        for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[rng.index(i)]);
        for (auto idx : train) {
            const auto& p = pairs[idx];
            const double lr =
                cfg.lr * std::max(cfg.min_lr_fraction, 1.0 - static_cast<double>(step++) / total_steps) * p.weight;
            auto h = E.hidden.row(p.center);
            grad_h.setZero();
            auto update = [&](std::uint32_t target, double label) {
                auto o = E.output.row(target);
                const double x = o.dot(h);
                epoch_total -= log_sigmoid(label > 0.0 ? x : -x);
                const double g = (label - sigmoid(x)) * lr;
                grad_h += g * o.transpose();
                o += g * h;
            };
            update(p.context, 1.0);
            for (int k = 0; k < cfg.negatives; ++k) {
                const auto n = negatives.sample(rng);
                if (n == p.context) continue;
                update(n, 0.0);
            }
            h += grad_h.transpose();
        }
        const double loss = monitor_loss();
        if (!std::isfinite(loss) || !E.hidden.allFinite() || !E.output.allFinite()) {
            std::ostringstream msg;
            msg << "skipgram diverged at epoch " << epoch + 1 << " (loss " << loss << ", lr " << cfg.lr
                << "); lower the learning rate";
            throw TrainingError(msg.str());
        }
        result.epoch_loss.push_back(loss);
        result.epoch_mean_loss.push_back(epoch_total / static_cast<double>(train.size()));
    }
    return result;
}

double plausibility_score(const EmbeddingTable& E, const std::string& property, const std::string& entity,
                          CosineMode mode) {
    const auto p = E.lookup(property);
    const auto e = E.lookup(entity);
    const auto a = mode == CosineMode::HiddenHidden ? E.hidden.row(p) : E.output.row(p);
    const auto b = E.hidden.row(e);
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

void SppmiSpec::validate() const {
    if (pair_counts.rows() != vocab_size || pair_counts.cols() != vocab_size)
        throw ValidationError("SPPMI: pair count matrix must be |V| x |V|");
    if (marginals.size() != vocab_size) throw ValidationError("SPPMI: marginals must have |V| entries");
    if (!(shift > 0.0)) throw ValidationError("SPPMI: shift k must be positive");
    auto check_counts = [](const SparseMatrix& m, const char* what) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (double v : m.row_values(r)) {
                if (v < 0.0 || v != std::floor(v))
                    throw ValidationError(std::string("SPPMI: ") + what + " must be nonnegative integers");
            }
        }
    };
    check_counts(pair_counts, "pair counts");
    for (std::size_t i = 0; i < vocab_size; ++i) {
        if (pair_counts.row_sum(i) != marginals[i])
            throw ValidationError("SPPMI: marginal " + std::to_string(i) + " != row sum of pair counts");
    }
    if (dw_pair_counts.rows() != 0 || dw_pair_counts.cols() != 0) {
        if (dw_pair_counts.rows() != vocab_size || dw_pair_counts.cols() != vocab_size)
            throw ValidationError("SPPMI: deepwalk count matrix must be |V| x |V|");
        check_counts(dw_pair_counts, "deepwalk pair counts");
        if (dw_pair_counts.nnz() > 0 && dw_vocab_size == 0)
            throw ValidationError("SPPMI: deepwalk vocabulary size must be positive");
    }
}

SppmiSpec make_sppmi_spec(SparseMatrix pair_counts, SparseMatrix dw_pair_counts, std::size_t dw_vocab_size,
                          double shift, double alpha_mix) {
    SppmiSpec s;
    s.vocab_size = pair_counts.rows();
    s.marginals.resize(s.vocab_size);
    for (std::size_t i = 0; i < s.vocab_size; ++i) s.marginals[i] = pair_counts.row_sum(i);
    s.pair_counts = std::move(pair_counts);
    s.dw_pair_counts = std::move(dw_pair_counts);
    s.dw_vocab_size = dw_vocab_size;
    s.shift = shift;
    s.alpha_mix = alpha_mix;
    return s;
}

SparseMatrix count_pairs(const std::vector<NodePair>& pairs, std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(pairs.size());
    for (const auto& [a, b] : pairs) t.push_back({a, b, 1.0});
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix build_sppmi(const SppmiSpec& spec) {
    spec.validate();
    const double V = static_cast<double>(spec.vocab_size);
    const bool mixed = spec.alpha_mix != 0.0 && spec.dw_pair_counts.nnz() > 0;
    std::vector<Triplet> out;
    for (std::uint32_t i = 0; i < spec.vocab_size; ++i) {
        // Union of the two sparsity patterns for row i.
        std::vector<std::pair<std::uint32_t, std::pair<double, double>>> row;
        auto pc = spec.pair_counts.row_cols(i);
        auto pv = spec.pair_counts.row_values(i);
        for (std::size_t k = 0; k < pc.size(); ++k) row.push_back({pc[k], {pv[k], 0.0}});
        if (mixed) {
            auto dc = spec.dw_pair_counts.row_cols(i);
            auto dv = spec.dw_pair_counts.row_values(i);
            for (std::size_t k = 0; k < dc.size(); ++k) row.push_back({dc[k], {0.0, dv[k]}});
        }
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 0; k < row.size();) {
            const auto j = row[k].first;
            double c = 0.0, d = 0.0;
            for (; k < row.size() && row[k].first == j; ++k) {
                c += row[k].second.first;
                d += row[k].second.second;
            }
            const double mi = spec.marginals[i], mj = spec.marginals[j];
            if (mi == 0.0 || mj == 0.0) continue;
            double assoc = V * c / (spec.shift * mi * mj);
            if (mixed) assoc += spec.alpha_mix * V * V * d / (spec.shift * static_cast<double>(spec.dw_vocab_size) * mi * mj);
            if (!(assoc > 1.0)) continue;  // log(assoc) <= 0, or undefined
            out.push_back({i, j, std::log(assoc)});
        }
    }
    return SparseMatrix::from_triplets(spec.vocab_size, spec.vocab_size, std::move(out));
}

void write_vectors(std::ostream& out, const std::vector<std::string>& tokens, const RowMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << tokens[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, " %.17g", m(i, j));
            out << buf;
        }
        out << '\n';
    }
}

void save_embedding(const EmbeddingTable& E, std::ostream& hidden, std::ostream& output) {
    write_vectors(hidden, E.tokens, E.hidden);
    write_vectors(output, E.tokens, E.output);
}

void save_embedding(const EmbeddingTable& E, const std::string& hidden_path, const std::string& output_path) {
    std::ofstream h(hidden_path, std::ios::binary), o(output_path, std::ios::binary);
    if (!h || !o) throw ConfigError("cannot write embedding files");
    save_embedding(E, h, o);
}

namespace {

std::pair<std::vector<std::string>, RowMatrix> read_vectors(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing embedding header", 1);
    std::istringstream header(line);
    long long rows = -1, cols = -1;
    if (!(header >> rows >> cols) || rows < 0 || cols < 1) throw ParseError("bad embedding header", 1);
    std::vector<std::string> tokens;
    RowMatrix m(rows, cols);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (static_cast<long long>(tokens.size()) == rows)
            throw ParseError("more rows than the header declares (" + std::to_string(rows) + ")", lineno);
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        const auto r = static_cast<Eigen::Index>(tokens.size());
        for (Eigen::Index j = 0; j < cols; ++j) {
            std::string field;
            if (!(ls >> field)) throw ParseError("row has fewer than " + std::to_string(cols) + " values", lineno);
            char* end = nullptr;
            m(r, j) = std::strtod(field.c_str(), &end);
            if (end == field.c_str() || *end != '\0') throw ParseError("bad number '" + field + "'", lineno);
        }
        std::string extra;
        if (ls >> extra) throw ParseError("row has more than " + std::to_string(cols) + " values", lineno);
        tokens.push_back(token);
    }
    if (static_cast<long long>(tokens.size()) != rows)
        throw ParseError("header declares " + std::to_string(rows) + " rows, found " + std::to_string(tokens.size()));
    return {std::move(tokens), std::move(m)};
}

}  // namespace

EmbeddingTable load_embedding(std::istream& hidden) {
    auto [tokens, h] = read_vectors(hidden);
    EmbeddingTable E(std::move(tokens), static_cast<int>(h.cols()));
    E.hidden = std::move(h);
    E.has_output = false;
    return E;
}

EmbeddingTable load_embedding(std::istream& hidden, std::istream& output) {
    EmbeddingTable E = load_embedding(hidden);
    auto [tokens, o] = read_vectors(output);
    if (tokens != E.tokens || o.cols() != E.hidden.cols())
        throw ParseError("hidden and output embedding files disagree on vocabulary or dimension");
    E.output = std::move(o);
    E.has_output = true;
    return E;
}

EmbeddingTable load_embedding_files(const std::string& hidden_path, const std::string& output_path) {
    std::ifstream h(hidden_path, std::ios::binary);
    if (!h) throw ConfigError("cannot open " + hidden_path);
    if (output_path.empty()) return load_embedding(h);
    std::ifstream o(output_path, std::ios::binary);
    if (!o) throw ConfigError("cannot open " + output_path);
    return load_embedding(h, o);
}

}  // namespace aai
