#pragma once

#include "aai/embedding.hpp"
#include "aai/gnn.hpp"
#include "aai/hypergraph.hpp"
#include "aai/score_table.hpp"

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace aai {

// Effective settings of one CLI run. Precedence, lowest first: defaults,
// --config file, AAI_<KEY> environment variables, command-line flags.
struct RunConfig {
    std::string corpus;
    std::string keywords;
    std::string out_dir = "out";
    int t = 2001;
    std::size_t k = 50;
    int gamma = 5;
    double alpha = 1.0;  // "inf" in JSON for the author-free walk
    double beta = 0.5;
    std::vector<double> beta_grid;
    std::string fusion = "vdw_z";
    std::size_t min_count = 3;
    std::size_t min_edge_size = 2;
    std::uint64_t seed = 0;
    unsigned workers = 1;

    int walk_length = 20;
    int walks_per_start = 10;
    int window = 8;
    bool exclude_self = false;
    int transition_steps = 2;

    int dim = 64;
    int epochs = 5;
    double lr = 0.025;
    int negatives = 5;
    std::string cosine = "output_hidden";

    std::string sd_method = "sum";
    bool sd_true_jaccard = false;
    int sd_window = 5;

    double sppmi_shift = 1.0;
    double sppmi_alpha = 0.0;

    std::string normalize_by = "k";  // or "predictions"

    GnnConfig gnn;

    void validate() const;  // ValidationError naming the offending field
};

RunConfig default_run_config();
std::string config_to_json(const RunConfig& c);  // pretty, keys sorted
RunConfig config_from_json_text(const std::string& text, const RunConfig& base);

// Reads a JSON config file over the defaults and validates it.
RunConfig validate_config(const std::string& path);

// FNV-1a 64 over the canonical JSON of the settings that affect outputs
// (out_dir and workers excluded), as 16 hex digits.
std::string config_hash(const RunConfig& c);

// Applies AAI_<UPPER_KEY> variables found through `getenv`.
RunConfig apply_env_overrides(RunConfig c, const char* (*getenv_fn)(const char*));

// Runs one pipeline stage. Exit codes: 0 success, 1 usage or validation
// error, 2 runtime error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

// Helpers shared by the stages.

// Unique tokens in first-appearance order, skipgram-trained over window pairs.
SkipgramResult embed_sequences(const std::vector<std::vector<std::string>>& sequences, int window,
                               const SkipgramConfig& cfg);

// Walk sequences as node labels.
std::vector<std::vector<std::string>> walk_tokens(const Hypergraph& h, const WalkConfig& cfg);
std::vector<std::vector<std::string>> read_token_sequences(std::istream& in);

// Cosine plausibility of each candidate against the property token; absent
// candidates score 0 and are flagged.
ScoreTable plausibility_table(const EmbeddingTable& E, const std::string& property,
                              const std::set<std::string>& candidates, CosineMode mode);

// SP-d from the property node over the clique expansion of all node kinds.
ScoreTable spd_table(const Hypergraph& h);

}  // namespace aai
