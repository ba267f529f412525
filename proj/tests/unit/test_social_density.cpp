#include "aai/error.hpp"
#include "aai/social_density.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace aai;

namespace {

const std::set<std::string> kX{"x"};
const std::set<std::string> kProp{"thermoelectric", "thermoelectrics"};

std::set<std::string> random_authors(Rng& rng, std::size_t pool) {
    std::set<std::string> s;
    for (std::size_t i = 0; i < pool; ++i) {
        if (rng.uniform() < 0.4) s.insert("a" + std::to_string(i));
    }
    return s;
}

}  // namespace

TEST_CASE("worked example from the author sets") {
    const auto c = fixtures::sd_example_corpus();
    CHECK(social_density(c, kX, kProp) == 0.25);
    CHECK(social_density(c, kX, kProp, 2008) == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(social_density(c, kX, kProp, 2007) == 0.0);
    CHECK(social_density(c, kX, kProp, 1990) == 0.0);
    SdOptions jac;
    jac.true_jaccard = true;
    CHECK(social_density(c, kX, kProp, {}, jac) == doctest::Approx(2.0 / 6));
    CHECK(social_density(std::set<std::string>{"a"}, std::set<std::string>{"b"}) == 0.0);
    CHECK_THROWS_AS(social_density(c, {}, kProp), DomainError);
}

TEST_CASE("yearwise series") {
    const auto c = fixtures::sd_example_corpus();
    const AuthorIndex idx(c);
    const auto s = yearwise_sd(idx, kX, kProp, 2009, 3);
    REQUIRE(s.values.size() == 3);
    CHECK(s.values[0] == doctest::Approx(1.0 / 6));
    CHECK(s.values[1] == 0.0);
    CHECK(s.values[2] == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(s.values[static_cast<std::size_t>(i)] == social_density(idx, kX, kProp, 2008 - i));
    CHECK(g_sum(s) == doctest::Approx(1.0 / 6));
    CHECK(g_sum(SdSeries{{0.1, 0.0, 0.2}, 3, 2000}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(yearwise_sd(idx, kX, kProp, 2009, 0), DomainError);
}

TEST_CASE("SD is symmetric, at most one half, and half only for equal sets") {
    Rng rng(1);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto a = random_authors(rng, 6), b = random_authors(rng, 6);
        const double ab = social_density(a, b);
        CHECK(ab == social_density(b, a));
        CHECK(ab <= 0.5);
        CHECK((ab == 0.5) == (a == b && !a.empty()));
        CHECK(social_density(a, a) == (a.empty() ? 0.0 : 0.5));
    }
}

TEST_CASE("g_sum is monotone in every yearly value") {
    Rng rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        SdSeries s{{}, 5, 2000};
        for (int i = 0; i < 5; ++i) s.values.push_back(rng.uniform(0, 0.5));
        auto raised = s;
        raised.values[rng.index(5)] += rng.uniform(0, 0.1);
        CHECK(g_sum(raised) >= g_sum(s));
    }
}

TEST_CASE("sd_score methods") {
    std::map<std::string, SdSeries> series;
    series["a"] = {{0.1, 0.0, 0.2}, 3, 2000};
    series["b"] = {{0.0, 0.0, 0.0}, 3, 2000};
    series["c"] = {{0.0, 0.3, 0.0}, 3, 2000};
    series["d"] = {{0.05, 0.0, 0.0}, 3, 2000};

    const auto sum = sd_score(series, SdMethod::Sum, {});
    CHECK(sum.at("a") == doctest::Approx(0.3));
    CHECK(sum.at("b") == 0.0);

    SdScoreParams p;
    p.k = 2;
    p.seed = 3;
    const auto r1 = sd_score(series, SdMethod::Rand, p);
    const auto r2 = sd_score(series, SdMethod::Rand, p);
    CHECK(r1.values == r2.values);
    double ones = 0;
    for (const auto& [name, v] : r1.values) {
        CHECK((v == 0.0 || v == 1.0));
        ones += v;
    }
    CHECK(ones == 2);
    CHECK(r1.at("b") == 0.0);
    p.k = 10;
    const auto all = sd_score(series, SdMethod::Rand, p);
    CHECK(all.at("a") + all.at("c") + all.at("d") == 3.0);
    CHECK(all.metadata.at("flag") == "fewer_than_k_nonzero");

    SdClassifier zero;
    zero.theta.assign(4, 0.0);
    p.classifier = &zero;
    for (const auto& [name, v] : sd_score(series, SdMethod::Class, p).values) CHECK(v == 0.5);
    p.classifier = nullptr;
    CHECK_THROWS_AS(sd_score(series, SdMethod::Class, p), DomainError);
    CHECK(parse_sd_method("rand") == SdMethod::Rand);
    CHECK_THROWS_AS(parse_sd_method("max"), ValidationError);
}

TEST_CASE("log-loss gradient matches finite differences") {
    Rng rng(4);
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        X.push_back({rng.uniform(0, 0.5), rng.uniform(0, 0.5), rng.uniform(0, 0.5)});
        y.push_back(static_cast<int>(rng.index(2)));
    }
    std::vector<double> theta{0.3, -1.2, 0.7, 2.0};
    const auto L = log_loss(theta, X, y);
    const double h = 1e-6;
    for (std::size_t d = 0; d < theta.size(); ++d) {
        auto up = theta, down = theta;
        up[d] += h;
        down[d] -= h;
        const double fd = (log_loss(up, X, y).value - log_loss(down, X, y).value) / (2 * h);
        CHECK(std::abs(fd - L.gradient[d]) / std::max(std::abs(fd), 1e-8) < 1e-6);
    }
}

TEST_CASE("classifier separates a separable set and ignores row order") {
    std::vector<std::vector<double>> X;
    std::vector<int> y;
    for (int i = 0; i < 10; ++i) {
        X.push_back({0.3 + 0.01 * i, 0.2});
        y.push_back(1);
        X.push_back({0.01 * i, 0.05});
        y.push_back(0);
    }
    const auto clf = train_sd_classifier(X, y);
    for (std::size_t i = 0; i < X.size(); ++i) CHECK((clf.posterior(X[i]) > 0.5) == (y[i] == 1));

    std::vector<std::size_t> perm(X.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<std::vector<double>> X2;
    std::vector<int> y2;
    for (auto i : perm) {
        X2.push_back(X[i]);
        y2.push_back(y[i]);
    }
    const auto clf2 = train_sd_classifier(X2, y2);
    for (std::size_t d = 0; d < clf.theta.size(); ++d) CHECK(clf2.theta[d] == doctest::Approx(clf.theta[d]).epsilon(1e-9));

    CHECK_THROWS_AS(train_sd_classifier({{0.1}, {0.2}}, {1, 1}), DomainError);
    CHECK_THROWS_AS(train_sd_classifier({{0.1}, {0.2, 0.3}}, {1, 0}), ValidationError);
}

TEST_CASE("classifier training set") {
    // q is first discussed with the property in 2003; u stays unstudied.
    Corpus c;
    c.keywords = KeywordSet(fixtures::property_keywords());
    c.records = {fixtures::record("r1", 2001, {"A", "B"}, {"q"}),
                 fixtures::record("r2", 2002, {"A"}, {"thermoelectric"}),
                 fixtures::record("r3", 2002, {"A"}, {"q"}),
                 fixtures::record("r4", 2003, {"A"}, {"q", "thermoelectric"}),
                 fixtures::record("r5", 2004, {"A"}, {"u"}),
                 fixtures::record("r6", 2004, {"C"}, {"z"}),
                 fixtures::record("r7", 2004, {"A"}, {"thermoelectric"})};
    const AuthorIndex idx(c);
    const auto set = build_sd_training_set(c, idx, {"u", "z"}, 2005, 3, 3);
    REQUIRE(set.labels.size() == set.features.size());
    const auto q = std::find(set.names.begin(), set.names.end(), "q");
    REQUIRE(q != set.names.end());
    const auto qi = static_cast<std::size_t>(q - set.names.begin());
    CHECK(set.labels[qi] == 1);
    // Series ending at 2003: [SD_2002, SD_2001, SD_2000].
    CHECK(set.features[qi][0] == 0.5);
    CHECK(set.features[qi][1] == 0.0);
    // z never shares an author with the property, so its all-zero row is dropped.
    CHECK(std::find(set.names.begin(), set.names.end(), "z") == set.names.end());
    const auto u = std::find(set.names.begin(), set.names.end(), "u");
    REQUIRE(u != set.names.end());
    CHECK(set.labels[static_cast<std::size_t>(u - set.names.begin())] == 0);
}
