#pragma once

#include "aai/hypergraph.hpp"
#include "aai/score_table.hpp"

#include <string>
#include <vector>

namespace aai {

// Standard normal quantile (Wichura's AS 241 rational approximations).
// Returns -inf / +inf at p = 0 / 1; throws DomainError outside [0, 1].
double normal_quantile(double p);

// Breadth-first hop counts from `source` to every material node over an
// unweighted adjacency. Unreachable materials get +infinity.
ScoreTable shortest_path_distances(const Hypergraph& h, const Adjacency& adj, NodeId source);

// Replaces every +infinity with (largest finite value + 1). An all-infinite
// table becomes all ones and is flagged in metadata["flag"].
ScoreTable apply_sentinel(const ScoreTable& t);

// s~(x) = phi(r(x) / (|S| + 1)), ranks ascending with ties averaged.
ScoreTable van_der_waerden(const ScoreTable& t);

enum class FusionMethod { VdwZ, Geometric, Harmonic, LinearLambda };

std::string fusion_name(FusionMethod m);
FusionMethod parse_fusion(const std::string& name);
inline constexpr FusionMethod kAllFusionMethods[] = {FusionMethod::VdwZ, FusionMethod::Geometric,
                                                     FusionMethod::Harmonic, FusionMethod::LinearLambda};

// vdw_z:         beta z(s~1) + (1 - beta) z(s~2)
// geometric:     (s1^beta s2^(1-beta))^(1/2)
// harmonic:      2 / (beta / s1 + (1 - beta) / s2)
// linear_lambda: beta s1 + lambda (1 - beta) s2, lambda = mean(s1) / mean(s2 over s2 > 0)
// Both tables must cover the same candidates. Larger fused = better.
ScoreTable combine_scores(const ScoreTable& s1, const ScoreTable& s2, double beta, FusionMethod method);

enum class RankDirection { MaxFirst, MinFirst };

struct Ranking {
    std::vector<std::string> candidates;
    bool truncated_k = false;  // k exceeded the number of candidates
};

// Top-k by score; ties broken by candidate label.
Ranking rank_candidates(const ScoreTable& t, std::size_t k, RankDirection direction = RankDirection::MaxFirst);

}  // namespace aai
