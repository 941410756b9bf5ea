#include "ontolink/folds.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "ontolink/errors.hpp"
#include "ontolink/random.hpp"

namespace ontolink {

namespace {

template <typename T>
std::vector<std::vector<T>> split(const std::vector<T>& items, std::size_t parts) {
  std::vector<std::vector<T>> out(parts);
  std::size_t at = 0;
  const auto sizes = fold_sizes(items.size(), parts);
  for (std::size_t f = 0; f < parts; ++f) {
    out[f].assign(items.begin() + static_cast<std::ptrdiff_t>(at),
                  items.begin() + static_cast<std::ptrdiff_t>(at + sizes[f]));
    at += sizes[f];
  }
  return out;
}

std::vector<NodePair> sample_non_edges(const SimpleGraph& g, std::size_t count, Rng& rng) {
  const std::uint64_t n = g.node_count();
  const std::uint64_t pairs = n * (n - 1) / 2;
  const std::uint64_t available = pairs - g.edge_count();
  if (available == 0) throw Error("negative sampling infeasible: the graph is complete");
  if (available < count) {
    throw Error("negative sampling infeasible: " + std::to_string(available) + " non-edges for " +
                std::to_string(count) + " positives");
  }

  std::vector<NodePair> out;
  out.reserve(count);
  if (count * 2 > available) {
    // Dense graph: rejection would stall, so enumerate and shuffle instead.
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (!g.has_edge(u, v)) out.push_back({u, v});
      }
    }
    std::shuffle(out.begin(), out.end(), rng);
    out.resize(count);
    return out;
  }

  std::unordered_set<NodePair, NodePairHash> seen;
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
  while (out.size() < count) {
    const NodeId a = pick(rng), b = pick(rng);
    if (a == b || g.has_edge(a, b)) continue;
    const auto pair = NodePair::canonical(a, b);
    if (seen.insert(pair).second) out.push_back(pair);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t parts) {
  std::vector<std::size_t> sizes(parts, n / parts);
  for (std::size_t f = 0; f < n % parts; ++f) ++sizes[f];
  return sizes;
}

FoldPlan make_folds(const SimpleGraph& g, std::uint64_t seed, std::size_t parts) {
  if (parts < 2) throw PreconditionError("need at least 2 folds");
  if (g.edge_count() < parts) {
    throw PreconditionError("need at least " + std::to_string(parts) + " edges, graph has " +
                            std::to_string(g.edge_count()));
  }
  auto rng = make_rng(seed, 0xF01D);
  auto positives = g.edges();
  std::shuffle(positives.begin(), positives.end(), rng);
  const auto negatives = sample_non_edges(g, positives.size(), rng);

  FoldPlan plan;
  plan.seed = seed;
  plan.n_pos = positives.size();
  plan.n_neg = negatives.size();
  auto pos_parts = split(positives, parts);
  auto neg_parts = split(negatives, parts);
  for (std::size_t f = 0; f < parts; ++f) plan.folds.push_back({std::move(pos_parts[f]), std::move(neg_parts[f])});
  return plan;
}

SimpleGraph training_graph(const SimpleGraph& g, const FoldPlan& plan, std::size_t held_out) {
  std::vector<NodePair> edges;
  edges.reserve(plan.n_pos);
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    if (f == held_out) continue;
    const auto& pos = plan.folds[f].positives;
    edges.insert(edges.end(), pos.begin(), pos.end());
  }
  return SimpleGraph::from_edges(g.node_count(), edges);
}

std::vector<NodePair> training_negatives(const FoldPlan& plan, std::size_t held_out) {
  std::vector<NodePair> out;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    if (f == held_out) continue;
    const auto& neg = plan.folds[f].negatives;
    out.insert(out.end(), neg.begin(), neg.end());
  }
  return out;
}

}  // namespace ontolink
