#pragma once

#include "aai/hypergraph.hpp"
#include "aai/sparse.hpp"

#include <vector>

namespace aai {

struct TransitionOptions {
    // false: a node is drawn from the chosen hyperedge with weight 1/d(e),
    // the current node included. true: weight 1/(d(e)-1) over the other
    // members; singleton edges are then ignored.
    bool exclude_self = false;
};

// Row-stochastic node-to-node matrix of a hypergraph random walk:
//   P(i,j) = 1/d(i) * sum over e containing i and j of 1/d(e),
// i.e. D_V^-1 R^T D_E^-1 R with R the |E| x |V| incidence matrix.
struct TransitionMatrix {
    SparseMatrix matrix;
    std::vector<bool> author;     // node kind mask
    std::vector<bool> dead_rows;  // rows with no outgoing mass
    bool exclude_self = false;

    std::size_t size() const { return matrix.rows(); }
    double operator()(NodeId i, NodeId j) const { return matrix.at(i, j); }
};

TransitionMatrix transition_matrix(const Hypergraph& h, const TransitionOptions& options = {});

// Probability of each node being reached from `source` in exactly `steps`
// steps with every intermediate node an author. Result is dense over all
// nodes. Evaluated as a vector-matrix chain starting from the source row.
std::vector<double> author_mediated_row(const TransitionMatrix& P, NodeId source, int steps);

// Throws DomainError when source or target is an author or steps < 2.
double author_mediated_transition(const TransitionMatrix& P, NodeId source, NodeId target, int steps);

// Average of the two directed length-2 author-mediated probabilities.
double symmetric_length2_score(const TransitionMatrix& P, NodeId w1, NodeId w2);

}  // namespace aai
