#include "aai/walks.hpp"

#include "aai/error.hpp"
#include "aai/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace aai {

void WalkConfig::validate() const {
    if (walk_length < 2) throw ValidationError("walk_length must be >= 2");
    if (walks_per_start < 1) throw ValidationError("walks_per_start must be >= 1");
    if (window < 1) throw ValidationError("window must be >= 1");
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    if (max_retries < 1) throw ValidationError("max_retries must be >= 1");
}

std::optional<NodeId> sample_step(const Hypergraph& h, NodeId current, double alpha, Rng& rng,
                                  bool exclude_self, int max_retries) {
    const auto& incident = h.incident_edges(current);
    if (incident.empty()) return std::nullopt;
    const bool concepts_only = std::isinf(alpha);

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        const auto& members = h.edge(incident[rng.index(incident.size())]).members;
        std::size_t authors = 0, concepts = 0;
        for (NodeId u : members) {
            if (exclude_self && u == current) continue;
            (h.is_author(u) ? authors : concepts) += 1;
        }
        if (concepts_only) {
            if (concepts == 0) continue;
            std::size_t pick = rng.index(concepts);
            for (NodeId u : members) {
                if ((exclude_self && u == current) || h.is_author(u)) continue;
                if (pick-- == 0) return u;
            }
        }
        const double total = static_cast<double>(authors) + alpha * static_cast<double>(concepts);
        if (!(total > 0.0)) continue;
        double r = rng.uniform() * total;
        NodeId last = current;
        for (NodeId u : members) {
            if (exclude_self && u == current) continue;
            const double w = h.is_author(u) ? 1.0 : alpha;
            if (w == 0.0) continue;
            last = u;
            if (r < w) return u;
            r -= w;
        }
        return last;  // rounding at the top of the range
    }
    return std::nullopt;
}

WalkCorpus generate_walks(const Hypergraph& h, const WalkConfig& cfg) {
    cfg.validate();
    if (h.node_count() == 0) throw DomainError("generate_walks: empty hypergraph");

    std::vector<NodeId> starts;
    for (NodeId v = 0; v < h.node_count(); ++v) {
        if (!h.is_author(v)) starts.push_back(v);
    }
    const auto per = static_cast<std::size_t>(cfg.walks_per_start);
    WalkCorpus wc;
    wc.start_policy = "material+property nodes, " + std::to_string(cfg.walks_per_start) + " walks each, length " +
                      std::to_string(cfg.walk_length);
    wc.sequences.resize(starts.size() * per);

    parallel_for(starts.size(), cfg.workers, [&](std::size_t s) {
        const NodeId start = starts[s];
        for (std::size_t w = 0; w < per; ++w) {
            Rng rng(derive_seed(cfg.seed, start, w));
            auto& seq = wc.sequences[s * per + w];
            seq.reserve(static_cast<std::size_t>(cfg.walk_length));
            seq.push_back(start);
            while (seq.size() < static_cast<std::size_t>(cfg.walk_length)) {
                auto next = sample_step(h, seq.back(), cfg.alpha, rng, cfg.exclude_self, cfg.max_retries);
                if (!next) break;
                seq.push_back(*next);
            }
        }
    });
    return wc;
}

std::vector<NodePair> window_pairs(const std::vector<std::vector<NodeId>>& sequences, int window) {
    if (window < 1) throw DomainError("window must be >= 1");
    std::vector<NodePair> pairs;
    const auto w = static_cast<std::ptrdiff_t>(window);
    for (const auto& seq : sequences) {
        const auto n = static_cast<std::ptrdiff_t>(seq.size());
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto lo = std::max<std::ptrdiff_t>(0, i - w);
            const auto hi = std::min<std::ptrdiff_t>(n - 1, i + w);
            for (auto j = lo; j <= hi; ++j) {
                if (j != i) pairs.emplace_back(seq[static_cast<std::size_t>(i)], seq[static_cast<std::size_t>(j)]);
            }
        }
    }
    return pairs;
}

std::vector<NodePair> window_pairs(const WalkCorpus& wc, int window, bool drop_authors, const Hypergraph& h) {
    if (!drop_authors) return window_pairs(wc.sequences, window);
    std::vector<std::vector<NodeId>> filtered;
    filtered.reserve(wc.sequences.size());
    for (const auto& seq : wc.sequences) {
        auto& f = filtered.emplace_back();
        for (NodeId v : seq) {
            if (!h.is_author(v)) f.push_back(v);
        }
    }
    return window_pairs(filtered, window);
}

std::vector<double> occurrence_counts(const std::vector<std::vector<NodeId>>& sequences, std::size_t n) {
    std::vector<double> counts(n, 0.0);
    for (const auto& seq : sequences) {
        for (NodeId v : seq) counts.at(v) += 1.0;
    }
    return counts;
}

NegativeSampler::NegativeSampler(const std::vector<double>& frequencies, double power) {
    cumulative_.resize(frequencies.size());
    double total = 0.0;
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        const double f = frequencies[i];
        if (!(f >= 0.0) || std::isinf(f)) throw DomainError("negative sampler: frequencies must be finite and >= 0");
        if (f > 0.0) total += std::pow(f, power);
        cumulative_[i] = total;
    }
    if (!(total > 0.0)) throw DomainError("negative sampler: no positive frequency");
    for (auto& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
}

std::uint32_t NegativeSampler::sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
}

double NegativeSampler::probability(std::size_t i) const {
    return cumulative_.at(i) - (i == 0 ? 0.0 : cumulative_[i - 1]);
}

NegativeSampler build_negative_sampler(const std::vector<double>& frequencies, double power) {
    return NegativeSampler(frequencies, power);
}

void write_walks(std::ostream& out, const WalkCorpus& wc, const Hypergraph& h) {
    for (const auto& seq : wc.sequences) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i) out << ' ';
            out << h.node(seq[i]).label;
        }
        out << '\n';
    }
}

}  // namespace aai
