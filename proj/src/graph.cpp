#include "ontolink/graph.hpp"

#include <algorithm>
#include <set>

#include "ontolink/errors.hpp"

namespace ontolink {

NodeId HeteroGraph::add_node(std::string_view name) {
  auto [it, inserted] = node_index_.try_emplace(std::string(name), static_cast<NodeId>(nodes.size()));
  if (inserted) nodes.emplace_back(name);
  return it->second;
}

std::uint32_t HeteroGraph::add_predicate(std::string_view name) {
  auto [it, inserted] =
      predicate_index_.try_emplace(std::string(name), static_cast<std::uint32_t>(predicates.size()));
  if (inserted) predicates.emplace_back(name);
  return it->second;
}

void HeteroGraph::add_edge(std::string_view s, std::string_view p, std::string_view o) {
  const NodeId sid = add_node(s);
  const std::uint32_t pid = add_predicate(p);
  const NodeId oid = add_node(o);
  edges.push_back({sid, pid, oid});
}

std::optional<NodeId> HeteroGraph::find_node(std::string_view name) const {
  auto it = node_index_.find(std::string(name));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

SimpleGraph SimpleGraph::from_edges(std::size_t n, std::span<const NodePair> edges) {
  std::vector<NodePair> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw PreconditionError("edge endpoint out of range");
    if (e.u == e.v) continue;
    canon.push_back(NodePair::canonical(e.u, e.v));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  SimpleGraph g(n);
  for (const auto& e : canon) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adjacency_.resize(2 * canon.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : canon) {
    g.adjacency_[cursor[e.u]++] = e.v;
    g.adjacency_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
  }
  return g;
}

bool SimpleGraph::has_edge(NodeId u, NodeId v) const {
  if (!valid(u) || !valid(v)) return false;
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<NodePair> SimpleGraph::edges() const {
  std::vector<NodePair> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

SimpleGraph SimpleGraph::with_changes(std::span<const NodePair> add, std::span<const NodePair> remove) const {
  std::set<NodePair> removed;
  for (const auto& e : remove) removed.insert(NodePair::canonical(e.u, e.v));
  std::vector<NodePair> next;
  next.reserve(edge_count() + add.size());
  for (const auto& e : edges()) {
    if (!removed.contains(e)) next.push_back(e);
  }
  next.insert(next.end(), add.begin(), add.end());
  return from_edges(node_count(), next);
}

NodeMap::NodeMap(std::vector<std::string> names) : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], static_cast<NodeId>(i)).second) {
      throw Error("duplicate node name: " + names_[i]);
    }
  }
}

std::optional<NodeId> NodeMap::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId NodeMap::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error("unknown node: " + std::string(name));
}

CollapsedGraph collapse(const HeteroGraph& hetero) {
  std::vector<NodePair> pairs;
  pairs.reserve(hetero.edges.size());
  for (const auto& e : hetero.edges) pairs.push_back({e.s, e.o});
  return {SimpleGraph::from_edges(hetero.nodes.size(), pairs), NodeMap(hetero.nodes)};
}

HeteroGraph filter_edges(const HeteroGraph& hetero, const SimpleGraph& keep) {
  HeteroGraph out;
  for (const auto& name : hetero.nodes) out.add_node(name);
  for (const auto& name : hetero.predicates) out.add_predicate(name);
  for (const auto& e : hetero.edges) {
    if (keep.has_edge(e.s, e.o)) out.edges.push_back(e);
  }
  return out;
}

}  // namespace ontolink
