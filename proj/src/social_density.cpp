#include "aai/social_density.hpp"

#include "aai/error.hpp"
#include "aai/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aai {

AuthorIndex::AuthorIndex(const Corpus& corpus) {
    for (const auto& rec : corpus.records) {
        std::set<std::string> terms;
        for (const auto& e : rec.entities) terms.insert(to_lower(e));
        for (const auto& t : rec.tokens) terms.insert(to_lower(t));
        for (const auto& term : terms) {
            auto& authors = by_term_[term][rec.year];
            authors.insert(rec.authors.begin(), rec.authors.end());
        }
    }
}

std::set<std::string> AuthorIndex::authors(const std::set<std::string>& terms, std::optional<int> year) const {
    std::set<std::string> out;
    for (const auto& term : terms) {
        auto it = by_term_.find(to_lower(term));
        if (it == by_term_.end()) continue;
        if (year) {
            auto y = it->second.find(*year);
            if (y != it->second.end()) out.insert(y->second.begin(), y->second.end());
        } else {
            for (const auto& [_, a] : it->second) out.insert(a.begin(), a.end());
        }
    }
    return out;
}

double social_density(const std::set<std::string>& ax, const std::set<std::string>& ay, const SdOptions& opt) {
    std::size_t overlap = 0;
    for (const auto& a : ax) overlap += ay.count(a);
    const std::size_t denom = opt.true_jaccard ? ax.size() + ay.size() - overlap : ax.size() + ay.size();
    if (denom == 0) return 0.0;
    return static_cast<double>(overlap) / static_cast<double>(denom);
}

double social_density(const AuthorIndex& index, const std::set<std::string>& x, const std::set<std::string>& y,
                      std::optional<int> year, const SdOptions& opt) {
    if (x.empty() || y.empty()) throw DomainError("social_density: keyword sets must be nonempty");
    return social_density(index.authors(x, year), index.authors(y, year), opt);
}

double social_density(const Corpus& corpus, const std::set<std::string>& x, const std::set<std::string>& y,
                      std::optional<int> year, const SdOptions& opt) {
    return social_density(AuthorIndex(corpus), x, y, year, opt);
}

SdSeries yearwise_sd(const AuthorIndex& index, const std::set<std::string>& x, const std::set<std::string>& y, int t,
                     int gamma, const SdOptions& opt) {
    if (gamma < 1) throw DomainError("yearwise_sd: gamma must be >= 1");
    SdSeries s{{}, gamma, t};
    s.values.reserve(static_cast<std::size_t>(gamma));
    for (int i = 1; i <= gamma; ++i) s.values.push_back(social_density(index, x, y, t - i, opt));
    return s;
}

double g_sum(const SdSeries& s) { return std::accumulate(s.values.begin(), s.values.end(), 0.0); }

namespace {

double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double linear(const std::vector<double>& theta, const std::vector<double>& x) {
    double z = theta[0];
    for (std::size_t i = 0; i < x.size(); ++i) z += theta[i + 1] * x[i];
    return z;
}

}  // namespace

double SdClassifier::posterior(const std::vector<double>& features) const {
    if (features.size() + 1 != theta.size()) throw ValidationError("classifier feature length mismatch");
    return sigmoid(linear(theta, features));
}

SdMethod parse_sd_method(const std::string& name) {
    if (name == "sum") return SdMethod::Sum;
    if (name == "rand") return SdMethod::Rand;
    if (name == "class") return SdMethod::Class;
    throw ValidationError("unknown SD score method '" + name + "' (expected sum, rand or class)");
}

ScoreTable sd_score(const std::map<std::string, SdSeries>& series, SdMethod method, const SdScoreParams& params) {
    ScoreTable t;
    t.provenance = Provenance::Sd;
    switch (method) {
        case SdMethod::Sum:
            t.metadata["method"] = "sum";
            for (const auto& [c, s] : series) t.values[c] = g_sum(s);
            break;
        case SdMethod::Rand: {
            t.metadata["method"] = "rand";
            std::vector<std::string> nonzero;
            for (const auto& [c, s] : series) {
                t.values[c] = 0.0;
                if (g_sum(s) > 0.0) nonzero.push_back(c);
            }
            Rng rng(params.seed);
            const std::size_t draws = std::min(params.k, nonzero.size());
            for (std::size_t i = 0; i < draws; ++i) {
                std::swap(nonzero[i], nonzero[i + rng.index(nonzero.size() - i)]);
                t.values[nonzero[i]] = 1.0;
            }
            if (draws < params.k) t.metadata["flag"] = "fewer_than_k_nonzero";
            break;
        }
        case SdMethod::Class:
            t.metadata["method"] = "class";
            if (!params.classifier) throw DomainError("sd_score: method 'class' needs a trained classifier");
            for (const auto& [c, s] : series) t.values[c] = params.classifier->posterior(s.values);
            break;
    }
    return t;
}

LogLoss log_loss(const std::vector<double>& theta, const std::vector<std::vector<double>>& features,
                 const std::vector<int>& labels) {
    LogLoss out;
    out.gradient.assign(theta.size(), 0.0);
    const double n = static_cast<double>(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double z = linear(theta, features[i]);
        // -[y log s(z) + (1-y) log(1-s(z))] = softplus(z) - y z
        out.value += softplus(z) - labels[i] * z;
        const double r = sigmoid(z) - labels[i];
        out.gradient[0] += r;
        for (std::size_t j = 0; j < features[i].size(); ++j) out.gradient[j + 1] += r * features[i][j];
    }
    out.value /= n;
    for (auto& g : out.gradient) g /= n;
    return out;
}

SdClassifier train_sd_classifier(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
                                 const ClassifierOptions& options) {
    if (features.empty() || features.size() != labels.size())
        throw ValidationError("train_sd_classifier: need equally many feature rows and labels");
    const std::size_t dim = features.front().size();
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != dim) throw ValidationError("train_sd_classifier: ragged feature rows");
        if (labels[i] != 0 && labels[i] != 1) throw ValidationError("train_sd_classifier: labels must be 0 or 1");
        (labels[i] ? pos : neg) = true;
    }
    if (!pos || !neg) throw DomainError("train_sd_classifier: both classes must be present");

    SdClassifier clf;
    clf.theta.assign(dim + 1, 0.0);
    for (clf.iterations = 0; clf.iterations < options.max_iterations; ++clf.iterations) {
        const auto loss = log_loss(clf.theta, features, labels);
        double norm = 0.0;
        for (double g : loss.gradient) norm += g * g;
        if (std::sqrt(norm) < options.tolerance) {
            clf.converged = true;
            break;
        }
        for (std::size_t j = 0; j < clf.theta.size(); ++j) clf.theta[j] -= options.lr * loss.gradient[j];
    }
    return clf;
}

SdTrainingSet build_sd_training_set(const Corpus& before, const AuthorIndex& index,
                                    const std::vector<std::string>& unstudied, int t, int gamma, int window,
                                    const SdOptions& opt) {
    const std::set<std::string> property(before.keywords.words().begin(), before.keywords.words().end());
    std::map<std::string, int> first_hit;
    for (const auto& rec : before.records) {
        if (!record_mentions_property(rec, before.keywords)) continue;
        for (const auto& e : rec.entities) {
            if (before.keywords.contains(e)) continue;
            auto [it, inserted] = first_hit.emplace(e, rec.year);
            if (!inserted) it->second = std::min(it->second, rec.year);
        }
    }
    SdTrainingSet set;
    auto add = [&](const std::string& name, int year, int label) {
        auto s = yearwise_sd(index, {name}, property, year, gamma, opt);
        if (g_sum(s) <= 0.0) return;
        set.names.push_back(name);
        set.features.push_back(std::move(s.values));
        set.labels.push_back(label);
    };
    for (const auto& [name, year] : first_hit) {
        if (year >= t - window && year < t) add(name, year, 1);
    }
    for (const auto& name : unstudied) add(name, t, 0);
    return set;
}

}  // namespace aai
