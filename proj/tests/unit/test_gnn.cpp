#include "aai/error.hpp"
#include "aai/gnn.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace aai;

namespace {

GnnConfig small_config() {
    GnnConfig cfg;
    cfg.layers = 2;
    cfg.sample_sizes = {4, 3};
    cfg.dims = {3, 4, 2};
    cfg.negatives = 2;
    cfg.seed = 1;
    return cfg;
}

GnnParams random_params(const GnnGraph& g, const GnnConfig& cfg, std::uint64_t seed) {
    auto p = init_gnn_params(g, cfg);
    Rng rng(seed);
    for (auto& W : p.weights) {
        for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = rng.uniform(-1, 1);
    }
    for (Eigen::Index i = 0; i < p.inputs.size(); ++i) p.inputs.data()[i] = rng.uniform(-1, 1);
    return p;
}

// A 6-cycle of materials with one chord, as a GNN graph.
GnnGraph ring() {
    std::vector<Node> nodes;
    for (int i = 0; i < 6; ++i) nodes.push_back({"r" + std::to_string(i), NodeKind::Material});
    std::vector<Hyperedge> edges;
    for (NodeId i = 0; i < 6; ++i) edges.push_back({"e" + std::to_string(i), 2000, {i, static_cast<NodeId>((i + 1) % 6)}});
    edges.push_back({"chord", 2000, {0, 3}});
    return make_gnn_graph(Hypergraph(std::move(nodes), std::move(edges)), GnnSetting::AuthorLess);
}

double rel_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST_CASE("default training setup") {
    const GnnConfig cfg;
    CHECK(cfg.layers == 2);
    CHECK(cfg.sample_sizes == std::vector<int>{25, 10});
    CHECK(cfg.batch_size == 1000);
    CHECK(cfg.negatives == 15);
    CHECK(cfg.lr == 5e-6);
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.sample_sizes = {25};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.lr = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.layers = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(parse_setting("author_less") == GnnSetting::AuthorLess);
    CHECK_THROWS_AS(parse_setting("authorless"), ValidationError);
}

TEST_CASE("neighborhood sampling") {
    const auto g = ring();
    Rng rng(2);
    const std::uint32_t r1 = g.local(1);
    auto s = sample_neighborhood(g, r1, 3, true, rng);
    CHECK(s.size() == 3);
    for (auto u : s) CHECK((u == r1 || u == g.local(0) || u == g.local(2)));

    std::vector<Node> nodes{{"x", NodeKind::Material}, {"y", NodeKind::Material}, {"lone", NodeKind::Material}};
    const auto g2 = make_gnn_graph(Hypergraph(nodes, {{"e", 2000, {0, 1}}}), GnnSetting::AuthorLess);
    const auto lone = g2.local(2);
    CHECK(sample_neighborhood(g2, lone, 5, false, rng) == std::vector<std::uint32_t>(5, lone));
    CHECK(sample_neighborhood(g2, lone, 5, true, rng) == std::vector<std::uint32_t>(5, lone));
    for (auto u : sample_neighborhood(g2, g2.local(0), 20, false, rng)) CHECK(u == g2.local(1));

    // r0 has neighbors r1, r5, r3 and itself: four equally likely outcomes.
    const auto r0 = g.local(0);
    std::map<std::uint32_t, double> counts;
    for (int i = 0; i < 2500; ++i) {
        for (auto u : sample_neighborhood(g, r0, 4, true, rng)) counts[u] += 1;
    }
    CHECK(counts.size() == 4);
    double chi = 0;
    for (const auto& [u, c] : counts) chi += (c - 2500.0) * (c - 2500.0) / 2500.0;
    CHECK(chi < 16.27);  // 3 dof, p = 0.001
}

TEST_CASE("encoder shapes and degenerate weights") {
    const auto g = ring();
    GnnConfig cfg;
    cfg.dims = {8, 12, 16};
    auto p = init_gnn_params(g, cfg);
    CHECK(p.inputs.rows() == 6);
    CHECK(p.weights[0].rows() == 8);
    CHECK(p.weights[1].cols() == 16);
    Rng rng(3);
    const std::vector<std::uint32_t> all{0, 1, 2, 3, 4, 5};
    const auto Z = encode(p, cfg, g, all, rng);
    CHECK(Z.rows() == 6);
    CHECK(Z.cols() == 16);
    for (auto& W : p.weights) W.setZero();
    CHECK(encode(p, cfg, g, all, rng).isZero());

    auto wrong = cfg;
    wrong.dims = {8, 12, 15};
    CHECK_THROWS_AS(encode(init_gnn_params(g, cfg), wrong, g, all, rng), ConfigError);

    GnnConfig structural = cfg;
    structural.trainable_inputs = false;
    structural.dims = {4, 5, 3};
    const auto sp = init_gnn_params(g, structural);
    CHECK(sp.inputs(0, 0) == 1.0);
    CHECK(sp.inputs(0, 1) == doctest::Approx(std::log1p(3.0)));
}

TEST_CASE("symmetric nodes get identical embeddings") {
    // x and y hang off the same hub z and start from the same input vector.
    std::vector<Node> nodes{{"x", NodeKind::Material}, {"y", NodeKind::Material}, {"z", NodeKind::Material},
                            {"w", NodeKind::Material}};
    const auto g = make_gnn_graph(Hypergraph(nodes, {{"e1", 2000, {0, 2}}, {"e2", 2000, {1, 2}}, {"e3", 2000, {2, 3}}}),
                                  GnnSetting::AuthorLess);
    auto cfg = small_config();
    cfg.include_self = false;
    auto p = random_params(g, cfg, 4);
    p.inputs.row(g.local(1)) = p.inputs.row(g.local(0));
    Rng rng(5);
    const auto Z = encode(p, cfg, g, {g.local(0), g.local(1)}, rng);
    CHECK(Z.row(0) == Z.row(1));
}

TEST_CASE("loss gradients match central differences with frozen samples") {
    const auto g = ring();
    for (bool self : {true, false}) {
        auto cfg = small_config();
        cfg.include_self = self;
        auto p = random_params(g, cfg, 6);
        LinkBatch batch;
        batch.positives = {{0, 1}, {2, 3}, {4, 0}};
        batch.negatives = {{3, 5}, {0, 1}, {2, 2}};
        Rng rng(7);
        const auto sg = sample_computation(g, cfg, batch_nodes(batch), rng);
        const auto grad = loss_and_grad(p, cfg, sg, batch);
        const double h = 1e-6;
        auto check_block = [&](RowMatrix& M, const RowMatrix& G) {
            for (Eigen::Index i = 0; i < M.size(); ++i) {
                const double keep = M.data()[i];
                M.data()[i] = keep + h;
                const double up = loss_and_grad(p, cfg, sg, batch).loss;
                M.data()[i] = keep - h;
                const double down = loss_and_grad(p, cfg, sg, batch).loss;
                M.data()[i] = keep;
                CHECK(rel_error(G.data()[i], (up - down) / (2 * h)) < 1e-4);
            }
        };
        for (std::size_t l = 0; l < p.weights.size(); ++l) check_block(p.weights[l], grad.weights[l]);
        check_block(p.inputs, grad.inputs);
    }
}

TEST_CASE("loss is additive over duplicated pairs") {
    const auto g = ring();
    const auto cfg = small_config();
    const auto p = random_params(g, cfg, 8);
    LinkBatch one;
    one.positives = {{1, 4}};
    one.negatives = {{2, 5}};
    LinkBatch two = one;
    two.positives.push_back(one.positives[0]);
    two.negatives.push_back(one.negatives[0]);
    Rng rng(9);
    const auto sg = sample_computation(g, cfg, batch_nodes(one), rng);
    CHECK(loss_and_grad(p, cfg, sg, two).loss == 2.0 * loss_and_grad(p, cfg, sg, one).loss);

    LinkBatch many;
    many.positives = {{0, 1}, {2, 3}, {5, 4}};
    many.negatives = {{3}, {1}, {0}};
    LinkBatch doubled = many;
    doubled.positives.insert(doubled.positives.end(), many.positives.begin(), many.positives.end());
    doubled.negatives.insert(doubled.negatives.end(), many.negatives.begin(), many.negatives.end());
    const auto sg2 = sample_computation(g, cfg, batch_nodes(many), rng);
    CHECK(loss_and_grad(p, cfg, sg2, doubled).loss == doctest::Approx(2.0 * loss_and_grad(p, cfg, sg2, many).loss).epsilon(1e-14));
    CHECK_THROWS_AS(loss_and_grad(p, cfg, sg2, LinkBatch{}), DomainError);
}

TEST_CASE("saturated positive pairs cost nothing") {
    const auto g = ring();
    GnnConfig cfg;
    cfg.layers = 1;
    cfg.sample_sizes = {3};
    cfg.dims = {2, 2};
    auto p = init_gnn_params(g, cfg);
    p.inputs.setConstant(10.0);
    p.weights[0] = RowMatrix::Identity(2, 2) * 100.0;
    LinkBatch batch;
    batch.positives = {{0, 1}};
    batch.negatives = {{}};
    Rng rng(10);
    const auto sg = sample_computation(g, cfg, batch_nodes(batch), rng);
    const auto r = loss_and_grad(p, cfg, sg, batch);
    CHECK(r.loss == 0.0);
    CHECK(r.weights[0].allFinite());

    batch.negatives = {{2}};
    const auto neg = loss_and_grad(p, cfg, sample_computation(g, cfg, batch_nodes(batch), rng), batch);
    CHECK(std::isfinite(neg.loss));
    CHECK(neg.loss > 1e5);
}

TEST_CASE("decoder is symmetric") {
    Rng rng(11);
    RowMatrix Z(5, 3);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = rng.uniform(-2, 2);
    for (std::uint32_t u = 0; u < 5; ++u) {
        for (std::uint32_t v = 0; v < 5; ++v) CHECK(link_score(Z, u, v) == link_score(Z, v, u));
    }
}

TEST_CASE("training loss falls over the first hundred steps") {
    const auto pp = fixtures::planted_partition(40, 0.4, 0.03, 12);
    const auto g = make_gnn_graph(pp.graph, GnnSetting::AuthorLess);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        for (auto v : g.nbrs[u]) pairs.emplace_back(u, v);
    }
    auto cfg = small_config();
    cfg.dims = {16, 16, 8};
    cfg.sample_sizes = {10, 5};
    cfg.batch_size = 32;
    cfg.negatives = 5;
    cfg.lr = 0.01;
    cfg.epochs = 1000;
    cfg.max_steps = 100;
    const auto r = train_autoencoder(g, pairs, cfg);
    REQUIRE(r.steps == 100);
    REQUIRE(r.loss_trace.size() == 100);
    double first = 0, last = 0;
    for (int i = 0; i < 10; ++i) {
        first += r.loss_trace[static_cast<std::size_t>(i)];
        last += r.loss_trace[r.loss_trace.size() - 1 - static_cast<std::size_t>(i)];
    }
    CHECK(last < first);
    CHECK(r.embeddings.rows() == static_cast<Eigen::Index>(g.size()));

    const auto again = train_autoencoder(g, pairs, cfg);
    CHECK(again.loss_trace == r.loss_trace);
    CHECK(again.embeddings == r.embeddings);
}

TEST_CASE("runaway learning rate aborts with the loss trace") {
    const auto pp = fixtures::planted_partition(30, 0.4, 0.05, 13);
    const auto g = make_gnn_graph(pp.graph, GnnSetting::AuthorLess);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        for (auto v : g.nbrs[u]) pairs.emplace_back(u, v);
    }
    auto cfg = small_config();
    cfg.batch_size = 8;
    cfg.lr = 50.0;
    cfg.epochs = 100;
    cfg.max_steps = 200;
    try {
        train_autoencoder(g, pairs, cfg);
        FAIL("expected divergence");
    } catch (const TrainingError& e) {
        CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
    CHECK_THROWS_AS(train_autoencoder(g, {}, cfg), DomainError);
}

TEST_CASE("full and author-less graphs differ when an author links materials") {
    const auto h = build_hypergraph(fixtures::g2_corpus());
    const auto full = make_gnn_graph(h, GnnSetting::Full);
    const auto bare = make_gnn_graph(h, GnnSetting::AuthorLess);
    const auto m1 = h.require(NodeKind::Material, "m1"), m2 = h.require(NodeKind::Material, "m2");
    CHECK(full.nbrs[full.local(m1)] == std::vector<std::uint32_t>{full.local(m2)});
    CHECK(bare.nbrs[bare.local(m1)].empty());
    CHECK_THROWS_AS(full.local(h.require(NodeKind::Author, "a1")), LookupError);
}

TEST_CASE("positive pairs per setting") {
    const auto h = fixtures::g1();
    for (auto setting : {GnnSetting::Full, GnnSetting::AuthorLess}) {
        const auto g = make_gnn_graph(h, setting);
        WalkConfig walk;
        walk.seed = 3;
        const auto pairs = gnn_positive_pairs(h, g, setting, walk);
        CHECK_FALSE(pairs.empty());
        for (const auto& [u, v] : pairs) {
            CHECK(u < g.size());
            CHECK(v < g.size());
        }
    }
}

TEST_CASE("checkpoint round trip") {
    const auto g = ring();
    auto cfg = small_config();
    cfg.setting = GnnSetting::AuthorLess;
    cfg.lr = 0.125;
    const auto p = random_params(g, cfg, 14);
    std::stringstream buf;
    save_checkpoint(buf, cfg, p);
    const auto [cfg2, p2] = load_checkpoint(buf);
    CHECK(cfg2.dims == cfg.dims);
    CHECK(cfg2.sample_sizes == cfg.sample_sizes);
    CHECK(cfg2.lr == cfg.lr);
    CHECK(cfg2.setting == GnnSetting::AuthorLess);
    REQUIRE(p2.weights.size() == p.weights.size());
    for (std::size_t l = 0; l < p.weights.size(); ++l) CHECK(p2.weights[l] == p.weights[l]);
    CHECK(p2.inputs == p.inputs);

    std::istringstream junk("{\"format\":\"something\"}\n");
    CHECK_THROWS_AS(load_checkpoint(junk), ParseError);
    std::string text = buf.str();
    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_checkpoint(truncated), ParseError);
}
