#pragma once

#include "aai/embedding.hpp"
#include "aai/hypergraph.hpp"
#include "aai/random.hpp"
#include "aai/walks.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace aai {

enum class GnnSetting { Full, AuthorLess };

std::string setting_name(GnnSetting s);
GnnSetting parse_setting(const std::string& name);

struct GnnConfig {
    int layers = 2;
    std::vector<int> sample_sizes{25, 10};  // k_1 (1-hop from the target), k_2, ...
    std::vector<int> dims{32, 32, 16};      // input, hidden..., output; layers + 1 entries
    std::size_t batch_size = 1000;
    int negatives = 15;
    double lr = 5e-6;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    GnnSetting setting = GnnSetting::Full;
    bool include_self = true;       // sample from N(i) + {i} instead of N(i)
    bool trainable_inputs = true;   // false: fixed structural features
    double init_scale = 0.1;        // uniform range of trainable inputs
    int epochs = 1;
    std::size_t max_steps = 0;      // 0: no limit beyond epochs
    double divergence_factor = 10.0;

    void validate() const;
};

// Kept nodes (materials and property) with local ids and neighbor lists.
struct GnnGraph {
    std::vector<NodeId> global;                   // local -> hypergraph id
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint32_t>> nbrs;  // local ids
    std::vector<double> degree_feature;
    std::vector<int> kind;                        // 0 material, 1 property

    std::size_t size() const { return nbrs.size(); }
    std::uint32_t local(NodeId global_id) const;  // LookupError if not kept
};

// author_less: two kept nodes are linked iff they share a paper.
// full: additionally linked when they share an author neighbor.
GnnGraph make_gnn_graph(const Hypergraph& h, GnnSetting setting);
GnnGraph make_gnn_graph(const Hypergraph& h, const Adjacency& adj);

struct GnnParams {
    std::vector<RowMatrix> weights;  // W_l : dims[l] x dims[l+1]
    RowMatrix inputs;                // h^0 : n x dims[0]
};

GnnParams init_gnn_params(const GnnGraph& g, const GnnConfig& cfg);

// k uniform draws with replacement from N(node) (+ node when include_self);
// an isolated node yields k copies of itself.
std::vector<std::uint32_t> sample_neighborhood(const GnnGraph& g, std::uint32_t node, int k, bool include_self,
                                               Rng& rng);

// Frozen neighborhood samples for one forward/backward evaluation.
struct SampledGraph {
    std::vector<std::vector<std::uint32_t>> levels;                // levels[l]: nodes needing h^l
    std::vector<std::vector<std::vector<std::uint32_t>>> samples;  // samples[l][i]: positions in levels[l-1]
    std::vector<std::uint32_t> target_pos;                         // node -> position in levels[L] (or npos)
};

SampledGraph sample_computation(const GnnGraph& g, const GnnConfig& cfg, const std::vector<std::uint32_t>& targets,
                                Rng& rng);

// Mean-aggregate -> linear -> ReLU per layer; the last layer stays linear.
// Row i is the embedding of nodes[i].
RowMatrix encode(const GnnParams& params, const GnnConfig& cfg, const GnnGraph& g,
                 const std::vector<std::uint32_t>& nodes, Rng& rng);
RowMatrix encode(const GnnParams& params, const GnnConfig& cfg, const SampledGraph& sg,
                 const std::vector<std::uint32_t>& nodes);

struct LinkBatch {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> positives;
    std::vector<std::vector<std::uint32_t>> negatives;  // per positive pair
};

struct GnnGradients {
    double loss = 0.0;
    std::vector<RowMatrix> weights;
    RowMatrix inputs;
};

// Summed over pairs: -log s(z_u.z_v) - sum_n log s(-z_u.z_n), with exact
// gradients through the frozen sampled graph.
GnnGradients loss_and_grad(const GnnParams& params, const GnnConfig& cfg, const SampledGraph& sg,
                           const LinkBatch& batch);

// Draws negatives and neighborhood samples from rng, then evaluates.
GnnGradients loss_and_grad(const GnnParams& params, const GnnConfig& cfg, const GnnGraph& g, const LinkBatch& positives,
                           const NegativeSampler& sampler, Rng& rng);

std::vector<std::uint32_t> batch_nodes(const LinkBatch& batch);

double link_score(const RowMatrix& embeddings, std::uint32_t u, std::uint32_t v);

struct GnnResult {
    GnnParams params;
    RowMatrix embeddings;             // one row per local node
    std::vector<double> loss_trace;   // mean loss per positive pair, per step
    std::size_t steps = 0;
};

// Mini-batch Adam over shuffled positive pairs (local ids). Throws
// TrainingError when the per-pair loss exceeds divergence_factor times the
// first step's, carrying the trace in the message.
GnnResult train_autoencoder(const GnnGraph& g, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                            const GnnConfig& cfg);

// Walk pairs for a setting: full uses alpha = 1 walks with authors dropped
// before windowing; author_less uses alpha = infinity walks. Pairs whose
// nodes are not in g are discarded.
std::vector<std::pair<std::uint32_t, std::uint32_t>> gnn_positive_pairs(const Hypergraph& h, const GnnGraph& g,
                                                                          GnnSetting setting, WalkConfig walk);

// Checkpoint: one line of config JSON, then `name rows cols` headers each
// followed by one line of row-major values.
void save_checkpoint(std::ostream& out, const GnnConfig& cfg, const GnnParams& params);
std::pair<GnnConfig, GnnParams> load_checkpoint(std::istream& in);

std::string gnn_config_json(const GnnConfig& cfg);

}  // namespace aai
