#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "ontolink/graph.hpp"

namespace ontolink {

// `src<TAB>pred<TAB>dst` per edge.
void write_hetero_tsv(std::ostream& out, const HeteroGraph& graph);
// `u<TAB>v` node ids per undirected edge.
void write_simple_tsv(std::ostream& out, const SimpleGraph& graph);
// `id<TAB>name` per node.
void write_nodes_tsv(std::ostream& out, const NodeMap& nodes);

NodeMap read_nodes_tsv(std::istream& in);

struct LoadedGraph {
  std::optional<HeteroGraph> hetero;  // present for three-column files
  SimpleGraph graph;
  NodeMap nodes;
};

// Three-column files are read as heterogeneous edges and collapsed. Two-column
// files hold node ids and need the nodes.tsv sidecar (looked up next to the
// graph when `nodes_path` is not given); without one, ids name themselves.
LoadedGraph load_graph_tsv(const std::filesystem::path& path,
                           const std::optional<std::filesystem::path>& nodes_path = std::nullopt);

}  // namespace ontolink
