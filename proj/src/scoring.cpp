#include "aai/scoring.hpp"

#include "aai/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace aai {

double normal_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("normal_quantile: p must lie in [0, 1]");
    if (p == 0.0) return -kInfinity;
    if (p == 1.0) return kInfinity;

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            ((((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                  4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
               1.3314166789178437745e+2) * r + 3.3871328727963666080e+0));
        const double den =
            ((((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                  2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
               4.2313330701600911252e+1) * r + 1.0));
        return q * num / den;
    }

    double r = std::sqrt(-std::log(q < 0 ? p : 1.0 - p));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return q < 0 ? -value : value;
}

ScoreTable shortest_path_distances(const Hypergraph& h, const Adjacency& adj, NodeId source) {
    if (source >= h.node_count() || source >= adj.size()) throw LookupError("SP-d source node not in graph");
    std::vector<double> dist(adj.size(), kInfinity);
    std::deque<NodeId> queue{source};
    dist[source] = 0.0;
    while (!queue.empty()) {
        const NodeId u = queue.front();
        queue.pop_front();
        for (NodeId v : adj.nbrs[u]) {
            if (std::isinf(dist[v])) {
                dist[v] = dist[u] + 1.0;
                queue.push_back(v);
            }
        }
    }
    ScoreTable t;
    t.provenance = Provenance::SpD;
    t.metadata["direction"] = "max_first";
    t.metadata["sign"] = "larger SP-d = more alien";
    for (NodeId v : h.nodes_of_kind(NodeKind::Material)) t.values[h.node(v).label] = dist[v];
    return t;
}

ScoreTable apply_sentinel(const ScoreTable& t) {
    if (t.provenance != Provenance::SpD) throw DomainError("apply_sentinel expects an SP-d table");
    ScoreTable out = t;
    double max_finite = -kInfinity;
    for (const auto& [_, v] : t.values) {
        if (std::isfinite(v)) max_finite = std::max(max_finite, v);
    }
    const bool all_infinite = std::isinf(max_finite);
    const double sentinel = all_infinite ? 1.0 : max_finite + 1.0;
    for (auto& [c, v] : out.values) {
        if (!std::isinf(v)) continue;
        if (all_infinite) {
            v = 1.0;
        } else {
            v = sentinel;
            out.flags[c] = "sentinel";
        }
    }
    if (all_infinite && !t.values.empty()) out.metadata["flag"] = "all_unbounded";
    out.metadata["sentinel"] = format_double(sentinel);
    return out;
}

namespace {

void require_finite(const ScoreTable& t, const char* what) {
    t.validate();
    for (const auto& [c, v] : t.values) {
        if (!std::isfinite(v))
            throw DomainError(std::string(what) + ": non-finite value for '" + c + "' (apply the SP-d sentinel first)");
    }
}

std::vector<double> zscore(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    std::vector<double> z(x.size(), 0.0);
    if (sd > 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean) / sd;
    }
    return z;
}

}  // namespace

ScoreTable van_der_waerden(const ScoreTable& t) {
    if (t.empty()) throw DomainError("van_der_waerden: empty score table");
    require_finite(t, "van_der_waerden");
    std::vector<std::pair<double, const std::string*>> sorted;
    sorted.reserve(t.size());
    for (const auto& [c, v] : t.values) sorted.emplace_back(v, &c);
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    ScoreTable out;
    out.provenance = t.provenance;
    out.metadata = t.metadata;
    out.metadata["transform"] = "van_der_waerden";
    const double denom = static_cast<double>(t.size()) + 1.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1].first == sorted[i].first) ++j;
        const double rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
        const double score = normal_quantile(rank / denom);
        for (std::size_t k = i; k <= j; ++k) out.values[*sorted[k].second] = score;
        i = j + 1;
    }
    return out;
}

std::string fusion_name(FusionMethod m) {
    switch (m) {
        case FusionMethod::VdwZ: return "vdw_z";
        case FusionMethod::Geometric: return "geometric";
        case FusionMethod::Harmonic: return "harmonic";
        case FusionMethod::LinearLambda: return "linear_lambda";
    }
    return "unknown";
}

FusionMethod parse_fusion(const std::string& name) {
    for (auto m : kAllFusionMethods) {
        if (fusion_name(m) == name) return m;
    }
    throw ValidationError("unknown fusion method '" + name + "' (expected vdw_z, geometric, harmonic or linear_lambda)");
}

ScoreTable combine_scores(const ScoreTable& s1, const ScoreTable& s2, double beta, FusionMethod method) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("combine_scores: beta must lie in [0, 1]");
    if (s1.size() != s2.size() ||
        !std::equal(s1.values.begin(), s1.values.end(), s2.values.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
        throw DomainError("combine_scores: score tables cover different candidates");
    if (s1.empty()) throw DomainError("combine_scores: empty score tables");
    require_finite(s1, "combine_scores(s1)");
    require_finite(s2, "combine_scores(s2)");

    ScoreTable out;
    out.provenance = Provenance::Fused;
    out.metadata["beta"] = format_double(beta);
    out.metadata["method"] = fusion_name(method);
    out.metadata["direction"] = "max_first";
    out.metadata["s1"] = std::string(provenance_name(s1.provenance));
    out.metadata["s2"] = std::string(provenance_name(s2.provenance));

    std::vector<std::string> names;
    std::vector<double> a, b;
    for (const auto& [c, v] : s1.values) {
        names.push_back(c);
        a.push_back(v);
    }
    for (const auto& [_, v] : s2.values) b.push_back(v);

    if (method == FusionMethod::Geometric || method == FusionMethod::Harmonic) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (!(a[i] > 0.0) || !(b[i] > 0.0))
                throw DomainError("combine_scores(" + fusion_name(method) + "): non-positive score for '" + names[i] +
                                  "'");
        }
    }

    std::vector<double> fused(names.size());
    switch (method) {
        case FusionMethod::VdwZ: {
            const auto t1 = van_der_waerden(s1), t2 = van_der_waerden(s2);
            std::vector<double> v1, v2;
            for (const auto& [_, v] : t1.values) v1.push_back(v);
            for (const auto& [_, v] : t2.values) v2.push_back(v);
            const auto z1 = zscore(v1), z2 = zscore(v2);
            for (std::size_t i = 0; i < fused.size(); ++i) fused[i] = beta * z1[i] + (1.0 - beta) * z2[i];
            break;
        }
        case FusionMethod::Geometric:
            for (std::size_t i = 0; i < fused.size(); ++i)
                fused[i] = std::sqrt(std::pow(a[i], beta) * std::pow(b[i], 1.0 - beta));
            break;
        case FusionMethod::Harmonic:
            for (std::size_t i = 0; i < fused.size(); ++i) fused[i] = 2.0 / (beta / a[i] + (1.0 - beta) / b[i]);
            break;
        case FusionMethod::LinearLambda: {
            const double mean1 = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
            double pos_sum = 0.0;
            std::size_t pos_n = 0;
            for (double v : b) {
                if (v > 0.0) {
                    pos_sum += v;
                    ++pos_n;
                }
            }
            double lambda = 1.0;
            if (pos_n == 0) {
                out.metadata["flag"] = "no_positive_s2_lambda_1";
            } else {
                lambda = mean1 / (pos_sum / static_cast<double>(pos_n));
                if (lambda < 0.0) {
                    lambda = -lambda;
                    out.metadata["flag"] = "negative_lambda_abs";
                } else if (lambda == 0.0) {
                    lambda = 1.0;
                    out.metadata["flag"] = "zero_lambda_1";
                }
            }
            out.metadata["lambda"] = format_double(lambda);
            for (std::size_t i = 0; i < fused.size(); ++i) fused[i] = beta * a[i] + lambda * (1.0 - beta) * b[i];
            break;
        }
    }
    for (std::size_t i = 0; i < names.size(); ++i) out.values.emplace_hint(out.values.end(), names[i], fused[i]);
    out.validate();
    return out;
}

Ranking rank_candidates(const ScoreTable& t, std::size_t k, RankDirection direction) {
    std::vector<std::pair<double, const std::string*>> items;
    items.reserve(t.size());
    for (const auto& [c, v] : t.values) items.emplace_back(v, &c);
    std::stable_sort(items.begin(), items.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return direction == RankDirection::MaxFirst ? x.first > y.first : x.first < y.first;
        return *x.second < *y.second;
    });
    Ranking r;
    r.truncated_k = k > items.size();
    const std::size_t n = std::min(k, items.size());
    r.candidates.reserve(n);
    for (std::size_t i = 0; i < n; ++i) r.candidates.push_back(*items[i].second);
    return r;
}

}  // namespace aai
