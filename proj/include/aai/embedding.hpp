#pragma once

#include "aai/random.hpp"
#include "aai/sparse.hpp"
#include "aai/walks.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace aai {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Hidden (input) and output weight vectors per token.
struct EmbeddingTable {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, std::uint32_t> index;
    RowMatrix hidden;
    RowMatrix output;
    bool has_output = true;  // false when loaded from a hidden-only file

    EmbeddingTable() = default;
    EmbeddingTable(std::vector<std::string> vocabulary, int dim);

    std::size_t size() const { return tokens.size(); }
    int dim() const { return static_cast<int>(hidden.cols()); }
    std::uint32_t lookup(const std::string& token) const;  // LookupError if absent
    bool contains(const std::string& token) const { return index.count(token) > 0; }
};

struct SkipgramConfig {
    int dim = 64;
    int epochs = 5;
    double lr = 0.025;
    double min_lr_fraction = 1e-4;  // linear decay floor
    int negatives = 5;
    std::uint64_t seed = 0;
    // Fraction of pairs withheld from training and used for the loss trace.
    // With 0, the trace is computed on a fixed sample of training pairs.
    double holdout_fraction = 0.0;
    std::size_t monitor_pairs = 1000;
};

struct SkipPair {
    std::uint32_t center;
    std::uint32_t context;
    double weight = 1.0;
};

struct SkipgramResult {
    EmbeddingTable table;
    std::vector<double> epoch_loss;       // mean monitor-pair loss after each epoch
    std::vector<double> epoch_mean_loss;  // mean pre-update training loss within each epoch
    double initial_loss = 0.0;
};

EmbeddingTable init_embedding(std::vector<std::string> vocabulary, int dim, std::uint64_t seed);

// Negative-sampling skipgram trained by SGD with linearly decaying rate.
// Throws TrainingError when the loss or parameters stop being finite.
SkipgramResult train_skipgram(std::vector<std::string> vocabulary, const std::vector<SkipPair>& pairs,
                              const NegativeSampler& negatives, const SkipgramConfig& cfg);

// -log s(o_ctx . h_c) - sum_n log s(-o_n . h_c)
double pair_loss(const EmbeddingTable& E, std::uint32_t center, std::uint32_t context,
                 const std::vector<std::uint32_t>& negatives);

struct PairGradient {
    Eigen::VectorXd hidden;                       // d/d hidden[center]
    std::vector<std::uint32_t> output_rows;       // context, then negatives
    std::vector<Eigen::VectorXd> output;          // d/d output[row], per entry above
};

PairGradient pair_loss_gradient(const EmbeddingTable& E, std::uint32_t center, std::uint32_t context,
                                const std::vector<std::uint32_t>& negatives);

enum class CosineMode { HiddenHidden, OutputHidden };

// cos(hidden[property], hidden[entity]) or cos(output[property], hidden[entity]).
// Zero vectors score 0.
double plausibility_score(const EmbeddingTable& E, const std::string& property, const std::string& entity,
                          CosineMode mode = CosineMode::OutputHidden);

// Counts and marginals for the (optionally deepwalk-mixed) SPPMI matrix.
// dw_pair_counts is indexed in the same vocabulary as pair_counts.
struct SppmiSpec {
    SparseMatrix pair_counts;
    std::vector<double> marginals;  // #(i) = sum_j #(i,j)
    std::size_t vocab_size = 0;
    SparseMatrix dw_pair_counts;
    std::size_t dw_vocab_size = 0;
    double shift = 1.0;      // k
    double alpha_mix = 0.0;  // may be negative

    void validate() const;
};

SppmiSpec make_sppmi_spec(SparseMatrix pair_counts, SparseMatrix dw_pair_counts, std::size_t dw_vocab_size,
                          double shift, double alpha_mix);

// Symmetric-window co-occurrence counts of (center, context) pairs.
SparseMatrix count_pairs(const std::vector<NodePair>& pairs, std::size_t n);

// Entry = max(0, log assoc) with
//   assoc = |V| #(i,j) / (k #(i) #(j)) + alpha |V|^2 #dw(i,j) / (k |V_dw| #(i) #(j)).
// Non-positive assoc (possible for negative alpha) maps to 0.
SparseMatrix build_sppmi(const SppmiSpec& spec);

// Text format: `<vocab_size> <dim>` header, then `<token> v1 ... vD` rows.
void write_vectors(std::ostream& out, const std::vector<std::string>& tokens, const RowMatrix& m);
void save_embedding(const EmbeddingTable& E, const std::string& hidden_path, const std::string& output_path);
void save_embedding(const EmbeddingTable& E, std::ostream& hidden, std::ostream& output);
EmbeddingTable load_embedding(std::istream& hidden);
EmbeddingTable load_embedding(std::istream& hidden, std::istream& output);
EmbeddingTable load_embedding_files(const std::string& hidden_path, const std::string& output_path = "");

}  // namespace aai
