#pragma once

#include "aai/hypergraph.hpp"
#include "aai/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace aai {

inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();

struct WalkConfig {
    // Weight of each non-author node relative to an author node inside the
    // chosen hyperedge. 1 is the unbiased walk; infinity never visits authors.
    double alpha = 1.0;
    int walk_length = 20;  // nodes per sequence, start included
    int walks_per_start = 10;
    int window = 8;
    std::uint64_t seed = 0;
    bool exclude_self = false;
    int max_retries = 16;  // edge resamples before a walk is truncated
    unsigned workers = 1;

    void validate() const;
};

// One step of the hypergraph walk: an incident hyperedge uniformly at random,
// then a member with weight 1 (author) or alpha (non-author). Returns nullopt
// when the walk has to be truncated (dead end or no admissible member after
// max_retries edge draws).
std::optional<NodeId> sample_step(const Hypergraph& h, NodeId current, double alpha, Rng& rng,
                                  bool exclude_self = false, int max_retries = 16);

struct WalkCorpus {
    std::vector<std::vector<NodeId>> sequences;
    std::string start_policy;
};

// walks_per_start walks from every material and property node, in node-id
// order. Walk w from start s draws from its own stream seeded by
// (seed, s, w), so output does not depend on the worker count.
WalkCorpus generate_walks(const Hypergraph& h, const WalkConfig& cfg);

using NodePair = std::pair<NodeId, NodeId>;

// Ordered (center, context) pairs at positional distance 1..window.
std::vector<NodePair> window_pairs(const WalkCorpus& wc, int window, bool drop_authors, const Hypergraph& h);

// Same windowing over arbitrary integer sequences.
std::vector<NodePair> window_pairs(const std::vector<std::vector<NodeId>>& sequences, int window);

// Occurrences of each node id over all sequences.
std::vector<double> occurrence_counts(const std::vector<std::vector<NodeId>>& sequences, std::size_t n);

// Draws index i with probability f_i^power / sum_j f_j^power (zero counts
// are never drawn).
class NegativeSampler {
public:
    NegativeSampler() = default;
    NegativeSampler(const std::vector<double>& frequencies, double power);

    std::uint32_t sample(Rng& rng) const;
    double probability(std::size_t i) const;
    std::size_t size() const { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;  // normalized, last element == 1
};

NegativeSampler build_negative_sampler(const std::vector<double>& frequencies, double power = 0.75);

// One sequence per line, space-separated node labels.
void write_walks(std::ostream& out, const WalkCorpus& wc, const Hypergraph& h);

}  // namespace aai
