#pragma once

#include "aai/corpus.hpp"
#include "aai/score_table.hpp"
#include "aai/scoring.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace aai {

// Entities of `before` that never share a record with a property keyword and
// are mentioned in more than `min_count` records. Keywords themselves are
// never candidates.
std::set<std::string> unstudied_set(const Corpus& before, std::size_t min_count = 3);

// Year in which each entity first shares a record with a property keyword.
std::map<std::string, int> first_discovery_years(const Corpus& corpus);

struct PredictionReport {
    int t = 0;
    std::size_t k = 0;
    std::vector<std::string> predictions;
    std::vector<int> years;           // t, t+1, ..., last year of the from-partition
    std::vector<double> hit_rates;    // a_tau per entry of `years`
    std::vector<double> cumulative;   // running sum of hit_rates
    std::vector<std::vector<std::string>> hits;  // predicted entities discovered in each year
    bool normalize_by_predictions = false;
    std::size_t candidate_count = 0;
    std::map<std::string, std::string> metadata;

    void validate() const;
};

struct HitRateOptions {
    // false: a_tau = |H & C_tau| / k. true: divide by |H| instead.
    bool normalize_by_predictions = false;
};

// Scans `from` year by year; C_tau holds the still-unstudied candidates that
// first co-occur with a property keyword in year tau, and is removed from
// the candidate pool afterwards.
PredictionReport cumulative_hit_rate(PredictionReport report, const std::set<std::string>& unstudied,
                                     const Corpus& from, const HitRateOptions& options = {});

void write_report_json(std::ostream& out, const PredictionReport& r);
PredictionReport read_report_json(std::istream& in);

// Keeps only the listed candidates (missing ones are skipped).
ScoreTable restrict_to(const ScoreTable& t, const std::set<std::string>& candidates);

std::vector<double> default_beta_grid();  // 0.0, 0.1, ..., 1.0

struct SweepRow {
    FusionMethod method;
    double beta;
    std::string candidate;
    double sp_d;  // after the sentinel rule
    double s2;
};

// For every method and beta: the top-k candidates of combine_scores(sentinel(s1), s2)
// with their SP-d and s2 values. `spd` may hold +infinity.
std::vector<SweepRow> beta_sweep_self_eval(const ScoreTable& spd, const ScoreTable& s2, const std::vector<double>& betas,
                                           std::size_t k, const std::vector<FusionMethod>& methods,
                                           unsigned workers = 1);

// Mean SP-d of the sweep rows for one (method, beta) cell.
double mean_spd(const std::vector<SweepRow>& rows, FusionMethod method, double beta);

// `method,beta,candidate,sp_d,s2`
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// Smallest grid beta whose mean SP-d has moved at least half way from the
// beta = 0 level to the beta = 1 level.
double halfway_crossing(const std::vector<SweepRow>& rows, FusionMethod method, const std::vector<double>& betas);

struct Benchmark {
    ScoreTable spd;  // integer hop counts 1..8, a few unreachable
    ScoreTable s2;   // positive, spread over two decades, anticorrelated with spd
};

Benchmark make_anticorrelated_benchmark(std::size_t n, std::uint64_t seed, double unreachable_fraction = 0.05);

}  // namespace aai
