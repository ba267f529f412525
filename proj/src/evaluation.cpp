#include "aai/evaluation.hpp"

#include "aai/error.hpp"
#include "aai/parallel.hpp"
#include "aai/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace aai {

std::set<std::string> unstudied_set(const Corpus& before, std::size_t min_count) {
    std::map<std::string, std::size_t> mentions;
    std::set<std::string> studied;
    for (const auto& rec : before.records) {
        const bool property = record_mentions_property(rec, before.keywords);
        for (const auto& e : rec.entities) {
            if (before.keywords.contains(e)) continue;
            ++mentions[e];
            if (property) studied.insert(e);
        }
    }
    std::set<std::string> out;
    for (const auto& [e, n] : mentions) {
        if (n > min_count && !studied.count(e)) out.insert(e);
    }
    return out;
}

std::map<std::string, int> first_discovery_years(const Corpus& corpus) {
    std::map<std::string, int> first;
    for (const auto& rec : corpus.records) {
        if (!record_mentions_property(rec, corpus.keywords)) continue;
        for (const auto& e : rec.entities) {
            if (corpus.keywords.contains(e)) continue;
            auto [it, inserted] = first.emplace(e, rec.year);
            if (!inserted) it->second = std::min(it->second, rec.year);
        }
    }
    return first;
}

void PredictionReport::validate() const {
    if (predictions.size() > k) throw ValidationError("report holds more than k predictions");
    if (hit_rates.size() != years.size() || cumulative.size() != years.size())
        throw ValidationError("report year vectors differ in length");
    double prev = 0.0;
    for (std::size_t i = 0; i < years.size(); ++i) {
        if (!(hit_rates[i] >= 0.0 && hit_rates[i] <= 1.0)) throw ValidationError("hit rate outside [0, 1]");
        if (cumulative[i] < prev) throw ValidationError("cumulative accuracy decreases");
        prev = cumulative[i];
    }
}

PredictionReport cumulative_hit_rate(PredictionReport report, const std::set<std::string>& unstudied,
                                     const Corpus& from, const HitRateOptions& options) {
    if (report.k == 0) throw ValidationError("k must be >= 1");
    report.normalize_by_predictions = options.normalize_by_predictions;
    report.years.clear();
    report.hit_rates.clear();
    report.cumulative.clear();
    report.hits.clear();
    report.candidate_count = unstudied.size();

    std::map<int, std::set<std::string>> cooccur;  // year -> entities sharing a record with a keyword
    int last = report.t - 1;
    for (const auto& rec : from.records) {
        if (rec.year < report.t) throw DomainError("cumulative_hit_rate: record '" + rec.id + "' predates t");
        last = std::max(last, rec.year);
        if (!record_mentions_property(rec, from.keywords)) continue;
        auto& s = cooccur[rec.year];
        s.insert(rec.entities.begin(), rec.entities.end());
    }

    const std::set<std::string> predicted(report.predictions.begin(), report.predictions.end());
    const double denom = options.normalize_by_predictions ? static_cast<double>(predicted.size())
                                                           : static_cast<double>(report.k);
    std::set<std::string> remaining = unstudied;
    double running = 0.0;
    for (int year = report.t; year <= last; ++year) {
        std::vector<std::string> hit;
        auto it = cooccur.find(year);
        if (it != cooccur.end()) {
            for (const auto& e : it->second) {
                if (!remaining.erase(e)) continue;
                if (predicted.count(e)) hit.push_back(e);
            }
        }
        const double a = denom > 0 ? static_cast<double>(hit.size()) / denom : 0.0;
        running += a;
        report.years.push_back(year);
        report.hit_rates.push_back(a);
        report.cumulative.push_back(running);
        report.hits.push_back(std::move(hit));
    }
    report.validate();
    return report;
}

void write_report_json(std::ostream& out, const PredictionReport& r) {
    nlohmann::ordered_json j;
    j["t"] = r.t;
    j["k"] = r.k;
    j["predictions"] = r.predictions;
    j["years"] = r.years;
    j["hit_rates"] = r.hit_rates;
    j["cumulative"] = r.cumulative;
    j["hits"] = r.hits;
    j["normalization"] = r.normalize_by_predictions ? "predictions" : "k";
    j["candidate_count"] = r.candidate_count;
    j["metadata"] = r.metadata;
    out << j.dump(2) << '\n';
}

PredictionReport read_report_json(std::istream& in) {
    try {
        const auto j = nlohmann::json::parse(in);
        PredictionReport r;
        r.t = j.at("t").get<int>();
        r.k = j.at("k").get<std::size_t>();
        r.predictions = j.at("predictions").get<std::vector<std::string>>();
        r.years = j.value("years", std::vector<int>{});
        r.hit_rates = j.value("hit_rates", std::vector<double>{});
        r.cumulative = j.value("cumulative", std::vector<double>{});
        r.hits = j.value("hits", std::vector<std::vector<std::string>>{});
        r.normalize_by_predictions = j.value("normalization", std::string("k")) == "predictions";
        r.candidate_count = j.value("candidate_count", std::size_t{0});
        r.metadata = j.value("metadata", std::map<std::string, std::string>{});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad prediction report: ") + e.what());
    }
}

ScoreTable restrict_to(const ScoreTable& t, const std::set<std::string>& candidates) {
    ScoreTable out;
    out.provenance = t.provenance;
    out.metadata = t.metadata;
    for (const auto& [c, v] : t.values) {
        if (!candidates.count(c)) continue;
        out.values.emplace_hint(out.values.end(), c, v);
        auto f = t.flags.find(c);
        if (f != t.flags.end()) out.flags.insert(*f);
    }
    return out;
}

std::vector<double> default_beta_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

std::vector<SweepRow> beta_sweep_self_eval(const ScoreTable& spd, const ScoreTable& s2, const std::vector<double>& betas,
                                           std::size_t k, const std::vector<FusionMethod>& methods, unsigned workers) {
    if (betas.empty() || methods.empty()) throw DomainError("beta sweep needs at least one beta and one method");
    const ScoreTable s1 = apply_sentinel(spd);
    const std::size_t cells = betas.size() * methods.size();
    std::vector<std::vector<SweepRow>> per_cell(cells);
    parallel_for(cells, workers, [&](std::size_t c) {
        const FusionMethod m = methods[c / betas.size()];
        const double beta = betas[c % betas.size()];
        const auto fused = combine_scores(s1, s2, beta, m);
        for (const auto& name : rank_candidates(fused, k).candidates)
            per_cell[c].push_back({m, beta, name, s1.at(name), s2.at(name)});
    });
    std::vector<SweepRow> rows;
    for (auto& cell : per_cell) rows.insert(rows.end(), cell.begin(), cell.end());
    return rows;
}

double mean_spd(const std::vector<SweepRow>& rows, FusionMethod method, double beta) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.method == method && r.beta == beta) {
            sum += r.sp_d;
            ++n;
        }
    }
    if (n == 0) throw LookupError("no sweep rows for " + fusion_name(method) + " at beta " + format_double(beta));
    return sum / static_cast<double>(n);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "method,beta,candidate,sp_d,s2\n";
    char beta[32];
    for (const auto& r : rows) {
        std::snprintf(beta, sizeof beta, "%.1f", r.beta);
        const bool coarse = std::abs(std::round(r.beta * 10.0) / 10.0 - r.beta) < 1e-12;
        out << fusion_name(r.method) << ',' << (coarse ? std::string(beta) : format_double(r.beta)) << ','
            << csv_field(r.candidate) << ',' << format_double(r.sp_d) << ',' << format_double(r.s2) << '\n';
    }
}

double halfway_crossing(const std::vector<SweepRow>& rows, FusionMethod method, const std::vector<double>& betas) {
    const double m0 = mean_spd(rows, method, 0.0);
    const double m1 = mean_spd(rows, method, 1.0);
    const double half = 0.5 * std::abs(m1 - m0);
    for (double b : betas) {
        if (std::abs(mean_spd(rows, method, b) - m0) >= half) return b;
    }
    return 1.0;
}

Benchmark make_anticorrelated_benchmark(std::size_t n, std::uint64_t seed, double unreachable_fraction) {
    Rng rng(derive_seed(seed, 0x62656e6368));
    Benchmark b;
    b.spd.provenance = Provenance::SpD;
    b.s2.provenance = Provenance::Plausibility;
    char name[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(name, sizeof name, "c%04zu", i);
        const double u = rng.uniform();
        const double hops = std::clamp(std::floor(1.0 + 8.0 * (1.0 - u) + 0.75 * rng.normal()), 1.0, 8.0);
        const bool unreachable = rng.uniform() < unreachable_fraction && u < 0.3;
        b.spd.values[name] = unreachable ? kInfinity : hops;
        b.s2.values[name] = 10.0 * std::pow(100.0, std::clamp(u + 0.1 * rng.normal(), 0.0, 1.0));
    }
    return b;
}

}  // namespace aai
