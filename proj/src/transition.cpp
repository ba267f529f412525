#include "aai/transition.hpp"

#include "aai/error.hpp"

namespace aai {

TransitionMatrix transition_matrix(const Hypergraph& h, const TransitionOptions& options) {
    const std::size_t n = h.node_count();
    TransitionMatrix P;
    P.exclude_self = options.exclude_self;
    P.author.resize(n);
    P.dead_rows.resize(n);

    std::vector<Triplet> triplets;
    for (NodeId i = 0; i < n; ++i) {
        P.author[i] = h.is_author(i);
        const auto& incident = h.incident_edges(i);
        std::size_t usable = 0;
        for (EdgeId e : incident) {
            if (!options.exclude_self || h.edge_size(e) > 1) ++usable;
        }
        if (usable == 0) {
            P.dead_rows[i] = true;
            continue;
        }
        const double inv_degree = 1.0 / static_cast<double>(usable);
        for (EdgeId e : incident) {
            const std::size_t size = h.edge_size(e);
            if (options.exclude_self) {
                if (size < 2) continue;
                const double w = inv_degree / static_cast<double>(size - 1);
                for (NodeId j : h.edge(e).members) {
                    if (j != i) triplets.push_back({i, j, w});
                }
            } else {
                const double w = inv_degree / static_cast<double>(size);
                for (NodeId j : h.edge(e).members) triplets.push_back({i, j, w});
            }
        }
    }
    P.matrix = SparseMatrix::from_triplets(n, n, std::move(triplets));
    return P;
}

namespace {

void require_concept(const TransitionMatrix& P, NodeId v, const char* role) {
    if (v >= P.size()) throw LookupError(std::string(role) + " node id out of range");
    if (P.author[v]) throw DomainError(std::string(role) + " must not be an author node");
}

}  // namespace

std::vector<double> author_mediated_row(const TransitionMatrix& P, NodeId source, int steps) {
    require_concept(P, source, "source");
    if (steps < 2) throw DomainError("author-mediated transitions need at least 2 steps");
    const std::size_t n = P.size();

    // x holds the probability mass on author nodes after each intermediate step.
    std::vector<double> x(n, 0.0);
    {
        auto cols = P.matrix.row_cols(source);
        auto vals = P.matrix.row_values(source);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (P.author[cols[k]]) x[cols[k]] = vals[k];
        }
    }
    std::vector<double> next(n);
    for (int s = 2; s < steps; ++s) {
        std::fill(next.begin(), next.end(), 0.0);
        for (NodeId a = 0; a < n; ++a) {
            if (x[a] == 0.0) continue;
            auto cols = P.matrix.row_cols(a);
            auto vals = P.matrix.row_values(a);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (P.author[cols[k]]) next[cols[k]] += x[a] * vals[k];
            }
        }
        x.swap(next);
    }
    std::vector<double> out(n, 0.0);
    for (NodeId a = 0; a < n; ++a) {
        if (x[a] == 0.0) continue;
        auto cols = P.matrix.row_cols(a);
        auto vals = P.matrix.row_values(a);
        for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] += x[a] * vals[k];
    }
    return out;
}

double author_mediated_transition(const TransitionMatrix& P, NodeId source, NodeId target, int steps) {
    require_concept(P, target, "target");
    return author_mediated_row(P, source, steps)[target];
}

double symmetric_length2_score(const TransitionMatrix& P, NodeId w1, NodeId w2) {
    return 0.5 * (author_mediated_transition(P, w1, w2, 2) + author_mediated_transition(P, w2, w1, 2));
}

}  // namespace aai
