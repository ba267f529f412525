#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include "aai/corpus.hpp"
#include "aai/hypergraph.hpp"
#include "aai/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

using aai::Corpus;
using aai::Hypergraph;
using aai::NodeId;
using aai::NodeKind;
using aai::PaperRecord;

// Exact fractions for small hand-checkable probabilities.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational(std::int64_t n = 0, std::int64_t d = 1) : num(n), den(d) { normalize(); }
    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline PaperRecord record(std::string id, int year, std::vector<std::string> authors, std::vector<std::string> entities,
                          std::vector<std::string> tokens = {}) {
    return PaperRecord{std::move(id), year, std::move(authors), std::move(entities), std::move(tokens)};
}

inline const std::vector<std::string>& property_keywords() {
    static const std::vector<std::string> kw{"thermoelectric", "thermoelectrics"};
    return kw;
}

// p1{a1,a2,m1,+P}, p2{a1,m1,m2}, p3{a3,m2,+P}
inline Corpus g1_corpus() {
    Corpus c;
    c.keywords = aai::KeywordSet(property_keywords());
    c.records = {record("p1", 2000, {"a1", "a2"}, {"m1", "thermoelectric"}),
                 record("p2", 2000, {"a1"}, {"m1", "m2"}),
                 record("p3", 2001, {"a3"}, {"m2"}, {"a", "thermoelectric", "alloy"})};
    return c;
}

inline Hypergraph g1() { return aai::build_hypergraph(g1_corpus()); }

// Two materials that never share a paper but share an author.
inline Corpus g2_corpus() {
    Corpus c;
    c.keywords = aai::KeywordSet(property_keywords());
    c.records = {record("p1", 2000, {"a1"}, {"m1"}), record("p2", 2000, {"a1"}, {"m2"})};
    return c;
}

// Author sets of a material x (entity "x") and of the property across 2007-2008:
// A(x) = {tri_up, tri_down, circle, star, diamond}, A(y) = {tri_up, square, diamond};
// in 2008 alone: {star, diamond, circle} and {tri_up, square, diamond}.
inline Corpus sd_example_corpus() {
    Corpus c;
    c.keywords = aai::KeywordSet(property_keywords());
    c.records = {record("r1", 2007, {"tri_up", "tri_down"}, {"x"}),
                 record("r2", 2007, {"circle"}, {"x"}),
                 record("r3", 2008, {"star", "diamond", "circle"}, {"x"}),
                 record("b1", 2008, {"tri_up", "square"}, {"thermoelectric"}),
                 record("b2", 2008, {"diamond"}, {"thermoelectric"})};
    return c;
}

// Six papers around t = 2003. Before t: m3 is studied, m1 m2 m4 m5 are not.
// m1 is discovered in 2003, m2 and m4 in 2004, m5 in 2005 (m1 recurs in 2005).
inline Corpus evaluation_corpus() {
    Corpus c;
    c.keywords = aai::KeywordSet(property_keywords());
    c.records = {record("e1", 2001, {"A1"}, {"m1", "m2"}),
                 record("e2", 2001, {"A2"}, {"m3", "thermoelectric"}),
                 record("e3", 2002, {"A1", "A3"}, {"m4", "m5"}),
                 record("e4", 2003, {"A2"}, {"m1", "thermoelectric"}),
                 record("e5", 2004, {"A3"}, {"m4", "m2", "thermoelectric"}),
                 record("e6", 2005, {"A1"}, {"m1", "m5", "thermoelectric"})};
    return c;
}

// Random hypergraph with 3..max_nodes nodes (kinds mixed, at least one
// author and one non-author) and 1..max_edges edges.
inline Hypergraph random_hypergraph(aai::Rng& rng, std::size_t max_nodes = 12, std::size_t max_edges = 8) {
    const std::size_t n = 3 + rng.index(max_nodes - 2);
    std::vector<aai::Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        NodeKind kind = rng.uniform() < 0.45 ? NodeKind::Author : NodeKind::Material;
        if (i == 0) kind = NodeKind::Author;
        if (i == 1) kind = NodeKind::Material;
        if (i == 2) kind = NodeKind::Property;
        nodes.push_back({"v" + std::to_string(i), kind});
    }
    std::vector<aai::Hyperedge> edges;
    const std::size_t m = 1 + rng.index(max_edges);
    for (std::size_t e = 0; e < m; ++e) {
        std::vector<NodeId> members;
        const std::size_t size = 1 + rng.index(std::min<std::size_t>(n, 5));
        for (std::size_t j = 0; j < size; ++j) members.push_back(static_cast<NodeId>(rng.index(n)));
        edges.push_back({"e" + std::to_string(e), 2000, members});
    }
    return Hypergraph(std::move(nodes), std::move(edges));
}

// Enumerates every walk (edge choice, member choice) of exactly `steps` steps
// from `source` to `target` whose intermediate nodes are all authors, straight
// from the generative description of one step.
template <class Number>
Number brute_author_mediated(const Hypergraph& h, NodeId source, NodeId target, int steps,
                             std::function<Number(std::int64_t, std::int64_t)> frac) {
    Number total = frac(0, 1);
    std::function<void(NodeId, int, Number)> go = [&](NodeId cur, int left, Number p) {
        const auto& inc = h.incident_edges(cur);
        for (auto e : inc) {
            const auto& members = h.edge(e).members;
            for (NodeId next : members) {
                const Number q = p * frac(1, static_cast<std::int64_t>(inc.size() * members.size()));
                if (left == 1) {
                    if (next == target) total = total + q;
                } else if (h.is_author(next)) {
                    go(next, left - 1, q);
                }
            }
        }
    };
    go(source, steps, frac(1, 1));
    return total;
}

inline double brute_author_mediated(const Hypergraph& h, NodeId s, NodeId t, int steps) {
    return brute_author_mediated<double>(h, s, t, steps, [](std::int64_t a, std::int64_t b) {
        return static_cast<double>(a) / static_cast<double>(b);
    });
}

inline Rational brute_author_mediated_exact(const Hypergraph& h, NodeId s, NodeId t, int steps) {
    return brute_author_mediated<Rational>(h, s, t, steps, [](std::int64_t a, std::int64_t b) { return Rational(a, b); });
}

// One-step probability straight from the generative description.
inline double brute_one_step(const Hypergraph& h, NodeId i, NodeId j) {
    double p = 0.0;
    const auto& inc = h.incident_edges(i);
    for (auto e : inc) {
        const auto& members = h.edge(e).members;
        for (NodeId v : members) {
            if (v == j) p += 1.0 / static_cast<double>(inc.size() * members.size());
        }
    }
    return p;
}

// Standard normal quantile by bisection on the extended-precision
// complementary error function: Phi(x) = erfc(-x / sqrt 2) / 2. Upper
// tail through symmetry, since erfc near 2 has no digits left.
inline long double oracle_quantile(long double p) {
    if (p > 0.5L) return -oracle_quantile(1.0L - p);
    long double lo = -40.0L, hi = 40.0L;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        const long double cdf = 0.5L * std::erfc(-mid / std::sqrt(2.0L));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5L * (lo + hi);
}

// True when the top-k of `fused` and the top-k of `pure` (both larger-first)
// agree once tie groups in `pure` are taken into account: the k pure scores
// picked by each list are the same multiset.
inline bool same_topk_up_to_ties(const std::map<std::string, double>& fused, const std::map<std::string, double>& pure,
                                 std::size_t k) {
    auto top = [&](const std::map<std::string, double>& by) {
        std::vector<std::pair<double, std::string>> items;
        for (const auto& [c, v] : by) items.emplace_back(v, c);
        std::stable_sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
        std::vector<double> picked;
        for (std::size_t i = 0; i < std::min(k, items.size()); ++i) picked.push_back(pure.at(items[i].second));
        std::sort(picked.begin(), picked.end());
        return picked;
    };
    return top(fused) == top(pure);
}

// Two communities of n/2 materials; each within-community pair is linked
// with probability p_in, each cross pair with p_out. Every link is a
// two-member hyperedge.
struct PlantedPartition {
    Hypergraph graph;
    std::vector<int> community;  // per node id
};

inline PlantedPartition planted_partition(std::size_t n, double p_in, double p_out, std::uint64_t seed) {
    aai::Rng rng(seed);
    PlantedPartition pp;
    std::vector<aai::Node> nodes;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back({"n" + std::to_string(i), NodeKind::Material});
        pp.community.push_back(i < n / 2 ? 0 : 1);
    }
    std::vector<aai::Hyperedge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = pp.community[i] == pp.community[j] ? p_in : p_out;
            if (rng.uniform() < p)
                edges.push_back({"e" + std::to_string(edges.size()), 2000,
                                 {static_cast<NodeId>(i), static_cast<NodeId>(j)}});
        }
    }
    pp.graph = Hypergraph(std::move(nodes), std::move(edges));
    return pp;
}

// Synthetic corpus for CLI runs: materials M0..M39, authors A0..A24, years
// 1995-2005, about 30% of records mention the property.
inline std::string synthetic_corpus_jsonl(std::uint64_t seed, int per_year = 30) {
    aai::Rng rng(seed);
    std::ostringstream out;
    int n = 0;
    for (int year = 1995; year <= 2005; ++year) {
        for (int r = 0; r < per_year; ++r) {
            std::vector<std::string> ents, auths;
            const auto ne = 1 + rng.index(3);
            while (ents.size() < ne) {
                const std::string m = "M" + std::to_string(rng.index(40));
                if (std::find(ents.begin(), ents.end(), m) == ents.end()) ents.push_back(m);
            }
            if (rng.uniform() < 0.3) ents.push_back("thermoelectric");
            const auto na = 1 + rng.index(3);
            while (auths.size() < na) {
                const std::string a = "A" + std::to_string(rng.index(25));
                if (std::find(auths.begin(), auths.end(), a) == auths.end()) auths.push_back(a);
            }
            auto list = [](const std::vector<std::string>& v) {
                std::string s = "[";
                for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ",\"" : "\"") + v[i] + "\"";
                return s + "]";
            };
            out << "{\"id\":\"p" << n++ << "\",\"year\":" << year << ",\"authors\":" << list(auths)
                << ",\"entities\":" << list(ents) << "}\n";
        }
    }
    return out.str();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        aai::Rng rng(static_cast<std::uint64_t>(std::hash<std::string>{}(tag)) ^
                     static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(this)));
        path = std::filesystem::temp_directory_path() / ("aai_" + tag + "_" + std::to_string(rng.next() % 1000000007));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace fixtures
