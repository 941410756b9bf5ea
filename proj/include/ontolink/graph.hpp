#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ontolink {

using NodeId = std::uint32_t;

// Undirected pair in canonical order (u < v).
struct NodePair {
  NodeId u = 0;
  NodeId v = 0;

  static NodePair canonical(NodeId a, NodeId b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }
  auto operator<=>(const NodePair&) const = default;
};

struct NodePairHash {
  std::size_t operator()(const NodePair& p) const noexcept {
    return (static_cast<std::size_t>(p.u) << 32) ^ p.v;
  }
};

// Directed labelled multigraph over named nodes, as produced by projection.
struct HeteroGraph {
  struct Edge {
    NodeId s = 0;
    std::uint32_t p = 0;
    NodeId o = 0;
    auto operator<=>(const Edge&) const = default;
  };

  std::vector<std::string> nodes;
  std::vector<std::string> predicates;
  std::vector<Edge> edges;
  bool directed = true;

  NodeId add_node(std::string_view name);
  std::uint32_t add_predicate(std::string_view name);
  void add_edge(std::string_view s, std::string_view p, std::string_view o);

  std::optional<NodeId> find_node(std::string_view name) const;
  std::size_t node_count() const { return nodes.size(); }

 private:
  std::unordered_map<std::string, NodeId> node_index_;
  std::unordered_map<std::string, std::uint32_t> predicate_index_;
};

// Undirected simple graph in CSR form: sorted neighbour lists, no self-loops,
// no duplicates, symmetric.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  explicit SimpleGraph(std::size_t n) : offsets_(n + 1, 0) {}

  // Self-loops are dropped and duplicate / reversed pairs merged.
  static SimpleGraph from_edges(std::size_t n, std::span<const NodePair> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return adjacency_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const;
  bool valid(NodeId u) const { return u < node_count(); }

  // Canonical edge list, ascending.
  std::vector<NodePair> edges() const;

  // Copy with `add` inserted and `remove` deleted.
  SimpleGraph with_changes(std::span<const NodePair> add, std::span<const NodePair> remove) const;

  bool operator==(const SimpleGraph&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

// id <-> node name (IRI or _:label)
class NodeMap {
 public:
  NodeMap() = default;
  explicit NodeMap(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(NodeId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<NodeId> find(std::string_view name) const;
  // Throws Error naming the unknown node.
  NodeId id(std::string_view name) const;

  bool operator==(const NodeMap& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> index_;
};

struct CollapsedGraph {
  SimpleGraph graph;
  NodeMap nodes;
};

// {a,b} in E iff some labelled edge joins a and b in either direction.
// Node ids are preserved from the heterogeneous graph.
CollapsedGraph collapse(const HeteroGraph& hetero);

// Restricts a heterogeneous graph to edges whose undirected pair is in `keep`.
HeteroGraph filter_edges(const HeteroGraph& hetero, const SimpleGraph& keep);

}  // namespace ontolink
