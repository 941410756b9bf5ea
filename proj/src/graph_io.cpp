#include "ontolink/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cols;
}

NodeId parse_id(std::string_view text, std::size_t line_no) {
  NodeId value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("expected a node id, got '" + std::string(text) + "'", line_no, 0);
  }
  return value;
}

bool skip_line(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line.empty() || line.front() == '#';
}

}  // namespace

void write_hetero_tsv(std::ostream& out, const HeteroGraph& graph) {
  for (const auto& e : graph.edges) {
    out << graph.nodes[e.s] << '\t' << graph.predicates[e.p] << '\t' << graph.nodes[e.o] << '\n';
  }
}

void write_simple_tsv(std::ostream& out, const SimpleGraph& graph) {
  for (const auto& e : graph.edges()) out << e.u << '\t' << e.v << '\n';
}

void write_nodes_tsv(std::ostream& out, const NodeMap& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) out << i << '\t' << nodes.name(static_cast<NodeId>(i)) << '\n';
}

NodeMap read_nodes_tsv(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2) throw ParseError("nodes file rows are id<TAB>name", line_no, 0);
    const NodeId id = parse_id(cols[0], line_no);
    if (id != names.size()) throw ParseError("node ids must be dense and ascending", line_no, 0);
    names.emplace_back(cols[1]);
  }
  return NodeMap(std::move(names));
}

LoadedGraph load_graph_tsv(const std::filesystem::path& path, const std::optional<std::filesystem::path>& nodes_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());

  HeteroGraph hetero;
  std::vector<NodePair> pairs;
  NodeId max_id = 0;
  int columns = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto cols = split_tabs(line);
    if (columns == 0) {
      if (cols.size() != 2 && cols.size() != 3) throw ParseError("graph rows need 2 or 3 tab-separated columns", line_no, 0);
      columns = static_cast<int>(cols.size());
    } else if (static_cast<int>(cols.size()) != columns) {
      throw ParseError("inconsistent column count", line_no, 0);
    }
    if (columns == 3) {
      hetero.add_edge(cols[0], cols[1], cols[2]);
    } else {
      const NodePair p{parse_id(cols[0], line_no), parse_id(cols[1], line_no)};
      max_id = std::max({max_id, p.u, p.v});
      pairs.push_back(p);
    }
  }

  LoadedGraph out;
  if (columns == 3 || columns == 0) {
    auto collapsed = collapse(hetero);
    out.graph = std::move(collapsed.graph);
    out.nodes = std::move(collapsed.nodes);
    out.hetero = std::move(hetero);
    return out;
  }

  auto sidecar = nodes_path.value_or(path.parent_path() / "nodes.tsv");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream nin(sidecar, std::ios::binary);
    out.nodes = read_nodes_tsv(nin);
    if (out.nodes.size() <= max_id) throw Error("node id " + std::to_string(max_id) + " missing from " + sidecar.string());
  } else if (nodes_path) {
    throw Error("cannot open " + nodes_path->string());
  } else {
    std::vector<std::string> names;
    for (NodeId i = 0; i <= max_id; ++i) names.push_back(std::to_string(i));
    out.nodes = NodeMap(std::move(names));
  }
  out.graph = SimpleGraph::from_edges(out.nodes.size(), pairs);
  return out;
}

}  // namespace ontolink
