#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "ontolink/graph.hpp"
#include "ontolink/random.hpp"

namespace testing_support {

using ontolink::CollapsedGraph;
using ontolink::HeteroGraph;
using ontolink::NodeId;
using ontolink::NodeMap;
using ontolink::NodePair;
using ontolink::SimpleGraph;

inline std::vector<std::string> numbered_names(std::size_t n, const std::string& prefix = "http://example.org/n") {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

inline SimpleGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  auto rng = ontolink::make_rng(seed, 1);
  std::bernoulli_distribution coin(p);
  std::vector<NodePair> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.push_back({u, v});
    }
  }
  return SimpleGraph::from_edges(n, edges);
}

// Stochastic block model over equal blocks. Within-block pairs are drawn one
// by one; between-block edges are drawn as a binomial count of uniform pairs,
// which keeps large sparse instances cheap.
inline SimpleGraph block_model(std::size_t blocks, std::size_t block_size, double p_in, double p_out,
                               std::uint64_t seed) {
  const std::size_t n = blocks * block_size;
  auto rng = ontolink::make_rng(seed, 2);
  std::bernoulli_distribution coin(p_in);
  std::vector<NodePair> edges;
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto base = static_cast<NodeId>(b * block_size);
    for (NodeId i = 0; i < block_size; ++i) {
      for (NodeId j = i + 1; j < block_size; ++j) {
        if (coin(rng)) edges.push_back({base + i, base + j});
      }
    }
  }
  const double n_d = static_cast<double>(n);
  const double within = static_cast<double>(blocks) * block_size * (block_size - 1) / 2.0;
  const double between = n_d * (n_d - 1) / 2.0 - within;
  std::binomial_distribution<std::uint64_t> count(static_cast<std::uint64_t>(between), p_out);
  const std::uint64_t wanted = count(rng);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  std::unordered_set<NodePair, ontolink::NodePairHash> seen;
  while (seen.size() < wanted) {
    const NodeId a = pick(rng), b = pick(rng);
    if (a / block_size == b / block_size) continue;
    seen.insert(NodePair::canonical(a, b));
  }
  edges.insert(edges.end(), seen.begin(), seen.end());
  return SimpleGraph::from_edges(n, edges);
}

// Preferential attachment: each new node links to m existing nodes chosen
// proportionally to degree.
inline SimpleGraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto rng = ontolink::make_rng(seed, 3);
  std::vector<NodePair> edges;
  std::vector<NodeId> ends;  // one entry per edge endpoint
  for (NodeId u = 0; u <= m; ++u) {
    for (NodeId v = u + 1; v <= m; ++v) {
      edges.push_back({u, v});
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  for (NodeId u = static_cast<NodeId>(m + 1); u < n; ++u) {
    std::set<NodeId> targets;
    while (targets.size() < m) {
      std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
      targets.insert(ends[pick(rng)]);
    }
    for (NodeId v : targets) {
      edges.push_back({v, u});
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  return SimpleGraph::from_edges(n, edges);
}

inline CollapsedGraph named(const SimpleGraph& g, const std::string& prefix = "http://example.org/n") {
  return {g, NodeMap(numbered_names(g.node_count(), prefix))};
}

// Entities at random points and relations as random translations; each
// (s, p) points at the entity nearest to e_s + r_p.
struct PlantedKG {
  HeteroGraph graph;
  std::vector<HeteroGraph::Edge> held_out;
};

inline PlantedKG planted_translation(std::size_t entities, std::size_t relations, std::size_t dims, double held_out,
                                     std::uint64_t seed) {
  auto rng = ontolink::make_rng(seed, 4);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd e(entities, dims), r(relations, dims);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = 0.5 * normal(rng);

  std::vector<HeteroGraph::Edge> triples;
  for (NodeId s = 0; s < entities; ++s) {
    for (std::uint32_t p = 0; p < relations; ++p) {
      const Eigen::RowVectorXd target = e.row(s) + r.row(p);
      NodeId best = s;
      double best_d = INFINITY;
      for (NodeId o = 0; o < entities; ++o) {
        if (o == s) continue;
        const double d = (e.row(o) - target).squaredNorm();
        if (d < best_d) best_d = d, best = o;
      }
      triples.push_back({s, p, best});
    }
  }
  std::shuffle(triples.begin(), triples.end(), rng);
  const auto n_held = static_cast<std::size_t>(held_out * static_cast<double>(triples.size()));

  PlantedKG kg;
  for (NodeId i = 0; i < entities; ++i) kg.graph.add_node("http://example.org/e" + std::to_string(i));
  for (std::uint32_t p = 0; p < relations; ++p) kg.graph.add_predicate("http://example.org/r" + std::to_string(p));
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (i < n_held) kg.held_out.push_back(triples[i]);
    else kg.graph.edges.push_back(triples[i]);
  }
  return kg;
}

// Version t+1 of `t`: `added` inserted, `removed` deleted, node `extra`
// names appended (present only in t+1).
inline CollapsedGraph next_version(const CollapsedGraph& t, const std::vector<NodePair>& added,
                                   const std::vector<NodePair>& removed, std::size_t extra_nodes = 0) {
  auto names = t.nodes.names();
  for (std::size_t i = 0; i < extra_nodes; ++i) names.push_back("http://example.org/new" + std::to_string(i));
  auto edges = t.graph.with_changes(added, removed).edges();
  return {SimpleGraph::from_edges(names.size(), edges), NodeMap(names)};
}

}  // namespace testing_support
