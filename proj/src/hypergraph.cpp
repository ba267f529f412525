#include "aai/hypergraph.hpp"

#include "aai/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

namespace aai {

std::string_view kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::Author: return "author";
        case NodeKind::Material: return "material";
        case NodeKind::Property: return "property";
    }
    return "unknown";
}

NodeKind parse_kind(std::string_view name) {
    if (name == "author") return NodeKind::Author;
    if (name == "material") return NodeKind::Material;
    if (name == "property") return NodeKind::Property;
    throw ParseError("unknown node kind '" + std::string(name) + "'");
}

Hypergraph::Hypergraph(std::vector<Node> nodes, std::vector<Hyperedge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), node_edges_(nodes_.size()) {
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (!index_.emplace(std::pair{nodes_[v].kind, nodes_[v].label}, v).second)
            throw ValidationError("duplicate " + std::string(kind_name(nodes_[v].kind)) + " node '" +
                                  nodes_[v].label + "'");
    }
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        auto& m = edges_[e].members;
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        if (m.empty()) throw ValidationError("hyperedge " + std::to_string(e) + " is empty");
        for (NodeId v : m) {
            if (v >= nodes_.size())
                throw ValidationError("hyperedge " + std::to_string(e) + " references unknown node " +
                                      std::to_string(v));
            node_edges_[v].push_back(e);
        }
    }
}

const Node& Hypergraph::node(NodeId v) const {
    if (v >= nodes_.size()) throw LookupError("unknown node id " + std::to_string(v));
    return nodes_[v];
}

std::optional<NodeId> Hypergraph::find(NodeKind kind, std::string_view label) const {
    auto it = index_.find(std::pair{kind, std::string(label)});
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NodeId Hypergraph::require(NodeKind kind, std::string_view label) const {
    auto v = find(kind, label);
    if (!v) throw LookupError("no " + std::string(kind_name(kind)) + " node '" + std::string(label) + "'");
    return *v;
}

std::optional<NodeId> Hypergraph::property_node() const {
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].kind == NodeKind::Property) return v;
    }
    return std::nullopt;
}

std::vector<NodeId> Hypergraph::nodes_of_kind(NodeKind kind) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].kind == kind) out.push_back(v);
    }
    return out;
}

Hypergraph build_hypergraph(const Corpus& corpus, const BuildOptions& options) {
    using Key = std::pair<NodeKind, std::string>;
    std::map<Key, NodeId> index;
    std::vector<Node> nodes;
    std::vector<Hyperedge> edges;
    std::size_t skipped = 0;

    auto intern = [&](NodeKind kind, const std::string& label) {
        auto [it, inserted] = index.emplace(Key{kind, label}, static_cast<NodeId>(nodes.size()));
        if (inserted) nodes.push_back({label, kind});
        return it->second;
    };

    const auto& kw = corpus.keywords;
    for (const auto& rec : corpus.records) {
        std::vector<std::pair<NodeKind, std::string>> members;
        for (const auto& a : rec.authors) members.emplace_back(NodeKind::Author, a);
        for (const auto& m : rec.entities) {
            if (!kw.contains(m)) members.emplace_back(NodeKind::Material, m);
        }
        if (record_mentions_property(rec, kw)) members.emplace_back(NodeKind::Property, kw.label());
        if (members.size() < std::max<std::size_t>(options.min_edge_size, 1)) {
            ++skipped;
            continue;
        }
        Hyperedge e{rec.id, rec.year, {}};
        for (const auto& [kind, label] : members) e.members.push_back(intern(kind, label));
        edges.push_back(std::move(e));
    }

    if (options.canonical_ids) {
        std::vector<NodeId> order(nodes.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
            return std::tie(nodes[a].kind, nodes[a].label) < std::tie(nodes[b].kind, nodes[b].label);
        });
        std::vector<NodeId> remap(nodes.size());
        std::vector<Node> sorted;
        sorted.reserve(nodes.size());
        for (NodeId i = 0; i < order.size(); ++i) {
            remap[order[i]] = i;
            sorted.push_back(nodes[order[i]]);
        }
        for (auto& e : edges) {
            for (auto& v : e.members) v = remap[v];
        }
        nodes = std::move(sorted);
    }

    Hypergraph h(std::move(nodes), std::move(edges));
    h.skipped_records = skipped;
    return h;
}

std::vector<NodeId> neighbors(const Hypergraph& h, NodeId v, std::optional<NodeKind> kind_filter) {
    h.node(v);
    std::vector<NodeId> out;
    for (EdgeId e : h.incident_edges(v)) {
        for (NodeId u : h.edge(e).members) {
            if (u == v) continue;
            if (kind_filter && h.node(u).kind != *kind_filter) continue;
            out.push_back(u);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool Adjacency::has_edge(NodeId u, NodeId v) const {
    const auto& n = nbrs.at(u);
    return std::binary_search(n.begin(), n.end(), v);
}

std::size_t Adjacency::edge_count() const {
    std::size_t total = 0;
    for (const auto& n : nbrs) total += n.size();
    return total / 2;
}

Adjacency projected_adjacency(const Hypergraph& h, const std::set<NodeKind>& keep, bool coauthor_augment) {
    if (keep.empty()) throw DomainError("projected_adjacency: keep set must be nonempty");
    Adjacency adj;
    adj.nbrs.resize(h.node_count());
    adj.kept.resize(h.node_count());
    for (NodeId v = 0; v < h.node_count(); ++v) adj.kept[v] = keep.count(h.node(v).kind) > 0;

    auto connect_all = [&](const std::vector<NodeId>& group) {
        for (NodeId u : group) {
            if (!adj.kept[u]) continue;
            for (NodeId w : group) {
                if (w != u && adj.kept[w]) adj.nbrs[u].push_back(w);
            }
        }
    };

    for (const auto& e : h.edges()) connect_all(e.members);
    if (coauthor_augment) {
        for (NodeId a : h.nodes_of_kind(NodeKind::Author)) connect_all(neighbors(h, a));
    }
    for (auto& n : adj.nbrs) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return adj;
}

void save_hypergraph(std::ostream& out, const Hypergraph& h) {
    nlohmann::json j;
    j["format"] = kHypergraphMagic;
    j["version"] = kHypergraphVersion;
    j["skipped_records"] = h.skipped_records;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& n : h.nodes()) nodes.push_back({{"label", n.label}, {"kind", kind_name(n.kind)}});
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : h.edges()) edges.push_back({{"paper", e.paper}, {"year", e.year}, {"nodes", e.members}});
    out << j.dump() << '\n';
}

Hypergraph load_hypergraph(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        if (j.value("format", "") != kHypergraphMagic) throw ParseError("not a hypergraph snapshot");
        if (j.value("version", 0) != kHypergraphVersion)
            throw ParseError("unsupported hypergraph snapshot version " + std::to_string(j.value("version", 0)));
        std::vector<Node> nodes;
        for (const auto& n : j.at("nodes"))
            nodes.push_back({n.at("label").get<std::string>(), parse_kind(n.at("kind").get<std::string>())});
        std::vector<Hyperedge> edges;
        for (const auto& e : j.at("edges"))
            edges.push_back({e.at("paper").get<std::string>(), e.at("year").get<int>(),
                             e.at("nodes").get<std::vector<NodeId>>()});
        Hypergraph h(std::move(nodes), std::move(edges));
        h.skipped_records = j.value("skipped_records", std::size_t{0});
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed hypergraph snapshot: ") + e.what());
    }
}

void save_hypergraph_file(const std::string& path, const Hypergraph& h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    save_hypergraph(out, h);
}

Hypergraph load_hypergraph_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return load_hypergraph(in);
}

}  // namespace aai
