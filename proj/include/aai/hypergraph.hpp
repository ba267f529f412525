#pragma once

#include "aai/corpus.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace aai {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class NodeKind : std::uint8_t { Author, Material, Property };

std::string_view kind_name(NodeKind kind);
NodeKind parse_kind(std::string_view name);

struct Node {
    std::string label;
    NodeKind kind = NodeKind::Material;
};

struct Hyperedge {
    std::string paper;
    int year = 0;
    std::vector<NodeId> members;  // sorted, unique
};

// Immutable incidence structure. Node ids are dense 0..N-1; node_edges is the
// transpose of the edge member lists (the vertex weight matrix in index form).
class Hypergraph {
public:
    Hypergraph() = default;
    // Member lists are sorted and deduplicated; out-of-range ids and empty
    // edges throw ValidationError.
    Hypergraph(std::vector<Node> nodes, std::vector<Hyperedge> edges);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const Node& node(NodeId v) const;
    const Hyperedge& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Hyperedge>& edges() const { return edges_; }

    std::size_t degree(NodeId v) const { return node_edges_.at(v).size(); }
    std::size_t edge_size(EdgeId e) const { return edges_.at(e).members.size(); }
    const std::vector<EdgeId>& incident_edges(NodeId v) const { return node_edges_.at(v); }

    bool is_author(NodeId v) const { return node(v).kind == NodeKind::Author; }
    std::optional<NodeId> find(NodeKind kind, std::string_view label) const;
    NodeId require(NodeKind kind, std::string_view label) const;  // LookupError if absent
    std::optional<NodeId> property_node() const;
    std::vector<NodeId> nodes_of_kind(NodeKind kind) const;

    // Records skipped during construction from a corpus.
    std::size_t skipped_records = 0;

private:
    std::vector<Node> nodes_;
    std::vector<Hyperedge> edges_;
    std::vector<std::vector<EdgeId>> node_edges_;
    std::map<std::pair<NodeKind, std::string>, NodeId, std::less<>> index_;
};

struct BuildOptions {
    // Assign node ids by (kind, label) order instead of first appearance.
    bool canonical_ids = false;
    // Records yielding fewer nodes than this are skipped and counted.
    std::size_t min_edge_size = 2;
};

// One hyperedge per record: authors, entities and the property node when the
// record mentions a keyword. Entities equal to a keyword map to the property
// node.
Hypergraph build_hypergraph(const Corpus& corpus, const BuildOptions& options = {});

// All u != v sharing at least one hyperedge with v, sorted by id.
std::vector<NodeId> neighbors(const Hypergraph& h, NodeId v, std::optional<NodeKind> kind_filter = {});

// Undirected simple graph over the full id space; nodes outside `kept` have
// no edges.
struct Adjacency {
    std::vector<std::vector<NodeId>> nbrs;  // sorted, unique, no self-loops
    std::vector<bool> kept;

    std::size_t size() const { return nbrs.size(); }
    bool has_edge(NodeId u, NodeId v) const;
    std::size_t edge_count() const;
};

Adjacency projected_adjacency(const Hypergraph& h, const std::set<NodeKind>& keep, bool coauthor_augment);

// Versioned JSON snapshot.
void save_hypergraph(std::ostream& out, const Hypergraph& h);
Hypergraph load_hypergraph(std::istream& in);
void save_hypergraph_file(const std::string& path, const Hypergraph& h);
Hypergraph load_hypergraph_file(const std::string& path);

inline constexpr const char* kHypergraphMagic = "aai-hypergraph";
inline constexpr int kHypergraphVersion = 1;

}  // namespace aai
