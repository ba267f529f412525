#include "aai/error.hpp"
#include "aai/evaluation.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace aai;

namespace {

PredictionReport report(int t, std::size_t k, std::vector<std::string> predictions) {
    PredictionReport r;
    r.t = t;
    r.k = k;
    r.predictions = std::move(predictions);
    return r;
}

}  // namespace

TEST_CASE("unstudied set") {
    auto c = fixtures::g1_corpus();
    c.records.push_back(fixtures::record("p4", 2001, {"a2"}, {"m3"}));
    CHECK(unstudied_set(c, 0) == std::set<std::string>{"m3"});
    CHECK(unstudied_set(c, 1).empty());
    CHECK(unstudied_set(c).empty());
    Corpus empty;
    empty.keywords = KeywordSet(fixtures::property_keywords());
    CHECK(unstudied_set(empty, 0).empty());

    const auto parts = partition_by_year(fixtures::evaluation_corpus(), 2003);
    CHECK(unstudied_set(parts.before, 0) == std::set<std::string>{"m1", "m2", "m4", "m5"});
    CHECK(unstudied_set(parts.before, 1).empty());

    const auto first = first_discovery_years(fixtures::evaluation_corpus());
    CHECK(first.at("m3") == 2001);
    CHECK(first.at("m1") == 2003);
    CHECK(first.at("m5") == 2005);
    CHECK_FALSE(first.count("thermoelectric"));
}

TEST_CASE("hit rate normalized by k") {
    const auto parts = partition_by_year(fixtures::evaluation_corpus(), 2003);
    const auto U = unstudied_set(parts.before, 0);
    const auto r = cumulative_hit_rate(report(2003, 4, {"m1", "m4", "m5"}), U, parts.from);
    CHECK(r.years == std::vector<int>{2003, 2004, 2005});
    CHECK(r.hit_rates == std::vector<double>{0.25, 0.25, 0.25});
    CHECK(r.cumulative == std::vector<double>{0.25, 0.5, 0.75});
    CHECK(r.hits[1] == std::vector<std::string>{"m4"});
    CHECK(r.candidate_count == 4);

    HitRateOptions by_h;
    by_h.normalize_by_predictions = true;
    const auto q = cumulative_hit_rate(report(2003, 4, {"m1", "m4", "m5"}), U, parts.from, by_h);
    for (double a : q.hit_rates) CHECK(a == doctest::Approx(1.0 / 3));
    CHECK(q.cumulative.back() == doctest::Approx(1.0));
}

TEST_CASE("hit rate hand cases") {
    Corpus before, from;
    before.keywords = from.keywords = KeywordSet(fixtures::property_keywords());
    before.records = {fixtures::record("r1", 2000, {"A"}, {"m2", "m5"})};
    from.records = {fixtures::record("r2", 2001, {"A"}, {"m2", "thermoelectric"}),
                    fixtures::record("r3", 2002, {"B"}, {"m5"})};
    const auto U = unstudied_set(before, 0);
    const auto r = cumulative_hit_rate(report(2001, 2, {"m2", "m5"}), U, from);
    CHECK(r.hit_rates == std::vector<double>{0.5, 0.0});
    CHECK(r.cumulative == std::vector<double>{0.5, 0.5});

    Corpus quiet = from;
    quiet.records = {fixtures::record("r9", 2003, {"B"}, {"m5"})};
    const auto none = cumulative_hit_rate(report(2001, 2, {"m2"}), U, quiet);
    CHECK(none.years == std::vector<int>{2001, 2002, 2003});
    for (double c : none.cumulative) CHECK(c == 0.0);

    Corpus early = from;
    early.records.push_back(fixtures::record("r0", 1999, {"A"}, {"m2"}));
    CHECK_THROWS_AS(cumulative_hit_rate(report(2001, 2, {"m2"}), U, early), DomainError);
    CHECK_THROWS_AS(cumulative_hit_rate(report(2001, 0, {}), U, from), ValidationError);
}

TEST_CASE("cumulative accuracy is monotone, bounded and counts each discovery once") {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        Corpus c;
        c.keywords = KeywordSet(fixtures::property_keywords());
        for (int i = 0; i < 40; ++i) {
            std::vector<std::string> ents;
            for (int j = 0; j < 3; ++j) {
                const std::string e = "m" + std::to_string(rng.index(12));
                if (std::find(ents.begin(), ents.end(), e) == ents.end()) ents.push_back(e);
            }
            if (rng.uniform() < 0.3) ents.push_back("thermoelectric");
            c.records.push_back(fixtures::record("r" + std::to_string(i), 2000 + static_cast<int>(rng.index(10)), {"A"}, ents));
        }
        const int t = 2003 + static_cast<int>(rng.index(4));
        const auto parts = partition_by_year(c, t);
        const auto U = unstudied_set(parts.before, 0);
        std::vector<std::string> H;
        for (const auto& e : U) {
            if (rng.uniform() < 0.5) H.push_back(e);
        }
        const std::size_t k = std::max<std::size_t>(H.size(), 1);
        HitRateOptions opt;
        opt.normalize_by_predictions = rng.uniform() < 0.5;
        const auto r = cumulative_hit_rate(report(t, k, H), U, parts.from, opt);
        double prev = 0;
        std::set<std::string> seen;
        for (std::size_t i = 0; i < r.years.size(); ++i) {
            CHECK(r.cumulative[i] >= prev);
            CHECK(r.cumulative[i] <= 1.0 + 1e-12);
            prev = r.cumulative[i];
            for (const auto& e : r.hits[i]) CHECK(seen.insert(e).second);
        }
    }
}

TEST_CASE("report JSON round trip") {
    const auto parts = partition_by_year(fixtures::evaluation_corpus(), 2003);
    auto r = cumulative_hit_rate(report(2003, 4, {"m1", "m4", "m5"}), unstudied_set(parts.before, 0), parts.from);
    r.metadata["config_hash"] = "0123456789abcdef";
    std::stringstream buf;
    write_report_json(buf, r);
    const auto back = read_report_json(buf);
    CHECK(back.predictions == r.predictions);
    CHECK(back.cumulative == r.cumulative);
    CHECK(back.hits == r.hits);
    CHECK(back.metadata == r.metadata);
    std::istringstream bad("{\"t\": \"x\"}");
    CHECK_THROWS_AS(read_report_json(bad), ParseError);
}

TEST_CASE("beta grid and restriction") {
    const auto grid = default_beta_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);
    CHECK(grid[3] == doctest::Approx(0.3));
    ScoreTable t;
    t.values = {{"a", 1}, {"b", 2}};
    CHECK(restrict_to(t, {"b", "z"}).values == std::map<std::string, double>{{"b", 2}});
}

TEST_CASE("beta sweep extremes") {
    const auto bench = make_anticorrelated_benchmark(200, 3);
    CHECK(bench.spd.size() == 200);
    CHECK(bench.spd.has_infinity());
    const auto grid = default_beta_grid();
    const std::vector<FusionMethod> methods{FusionMethod::VdwZ, FusionMethod::Geometric, FusionMethod::Harmonic};
    const auto rows = beta_sweep_self_eval(bench.spd, bench.s2, grid, 20, methods);
    CHECK(rows.size() == 3 * 11 * 20);

    // Pure SP-d top-20 with the sentinel applied.
    const auto spd = apply_sentinel(bench.spd);
    std::vector<double> pure;
    for (const auto& c : rank_candidates(spd, 20).candidates) pure.push_back(spd.at(c));
    std::sort(pure.begin(), pure.end());
    for (auto m : methods) {
        std::vector<double> at_one;
        for (const auto& r : rows) {
            if (r.method == m && r.beta == 1.0) at_one.push_back(r.sp_d);
        }
        std::sort(at_one.begin(), at_one.end());
        CHECK(at_one == pure);
        CHECK(mean_spd(rows, m, 1.0) >= mean_spd(rows, m, 0.0));
        const double cross = halfway_crossing(rows, m, grid);
        CHECK(cross >= 0.0);
        CHECK(cross <= 1.0);
    }
    const auto again = beta_sweep_self_eval(bench.spd, bench.s2, grid, 20, methods, 4);
    REQUIRE(again.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].candidate == rows[i].candidate);

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    CHECK(csv.str().rfind("method,beta,candidate,sp_d,s2\n", 0) == 0);
}

TEST_CASE("benchmark is reproducible and anticorrelated") {
    const auto a = make_anticorrelated_benchmark(500, 7);
    const auto b = make_anticorrelated_benchmark(500, 7);
    CHECK(a.spd.values == b.spd.values);
    CHECK(a.s2.values == b.s2.values);
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    std::size_t n = 0;
    for (const auto& [c, d] : a.spd.values) {
        if (std::isinf(d)) continue;
        CHECK(d >= 1.0);
        CHECK(d <= 8.0);
        const double y = std::log(a.s2.at(c));
        CHECK(a.s2.at(c) > 0.0);
        sx += d;
        sy += y;
        sxy += d * y;
        sxx += d * d;
        syy += y * y;
        ++n;
    }
    const double N = static_cast<double>(n);
    const double corr = (sxy - sx * sy / N) / std::sqrt((sxx - sx * sx / N) * (syy - sy * sy / N));
    CHECK(corr < -0.5);
}
