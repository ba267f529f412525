#pragma once

#include "aai/corpus.hpp"
#include "aai/score_table.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace aai {

// term (lower-cased entity or token) -> year -> authors using it that year.
class AuthorIndex {
public:
    explicit AuthorIndex(const Corpus& corpus);

    // Authors who used any of the terms, optionally only in one year.
    std::set<std::string> authors(const std::set<std::string>& terms, std::optional<int> year = {}) const;

private:
    std::unordered_map<std::string, std::map<int, std::set<std::string>>> by_term_;
};

struct SdOptions {
    // |A(X) & A(Y)| / (|A(X)| + |A(Y)|) by default; true switches the
    // denominator to |A(X) | A(Y)|.
    bool true_jaccard = false;
};

double social_density(const std::set<std::string>& ax, const std::set<std::string>& ay, const SdOptions& opt = {});
double social_density(const AuthorIndex& index, const std::set<std::string>& x, const std::set<std::string>& y,
                      std::optional<int> year = {}, const SdOptions& opt = {});
double social_density(const Corpus& corpus, const std::set<std::string>& x, const std::set<std::string>& y,
                      std::optional<int> year = {}, const SdOptions& opt = {});

// [SD_{t-1}, SD_{t-2}, ..., SD_{t-gamma}]
struct SdSeries {
    std::vector<double> values;
    int gamma = 0;
    int t = 0;
};

SdSeries yearwise_sd(const AuthorIndex& index, const std::set<std::string>& x, const std::set<std::string>& y, int t,
                     int gamma, const SdOptions& opt = {});

double g_sum(const SdSeries& s);

// Logistic regression weights: [intercept, w_1 .. w_gamma].
struct SdClassifier {
    std::vector<double> theta;
    int iterations = 0;
    bool converged = false;

    double posterior(const std::vector<double>& features) const;
};

enum class SdMethod { Sum, Rand, Class };
SdMethod parse_sd_method(const std::string& name);

struct SdScoreParams {
    std::size_t k = 50;
    std::uint64_t seed = 0;
    const SdClassifier* classifier = nullptr;
};

// sum: g_sum. rand: 1 for k uniform draws (without replacement) from the
// candidates with g_sum > 0, else 0. class: classifier posterior.
ScoreTable sd_score(const std::map<std::string, SdSeries>& series, SdMethod method, const SdScoreParams& params);

struct LogLoss {
    double value = 0.0;
    std::vector<double> gradient;
};

// Mean negative log-likelihood of labels in {0,1} under sigma(theta . [1; x]).
LogLoss log_loss(const std::vector<double>& theta, const std::vector<std::vector<double>>& features,
                 const std::vector<int>& labels);

struct ClassifierOptions {
    double lr = 1.0;
    int max_iterations = 20000;
    double tolerance = 1e-6;  // gradient norm
};

// Full-batch gradient descent. Throws DomainError when only one class is present.
SdClassifier train_sd_classifier(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
                                 const ClassifierOptions& options = {});

struct SdTrainingSet {
    std::vector<std::string> names;
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
};

// Positives: entities whose first same-record co-occurrence with a property
// keyword falls in [t - window, t - 1], featurized with the series ending at
// that year. Negatives: the given unstudied entities, featurized at t. Rows
// with an all-zero series are dropped.
SdTrainingSet build_sd_training_set(const Corpus& before, const AuthorIndex& index,
                                    const std::vector<std::string>& unstudied, int t, int gamma, int window,
                                    const SdOptions& opt = {});

}  // namespace aai
