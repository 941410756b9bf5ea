#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ontolink/graph.hpp"

namespace ontolink {

struct Fold {
  std::vector<NodePair> positives;
  std::vector<NodePair> negatives;
};

struct FoldPlan {
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

// Sizes of `parts` near-equal slices of `n`; earlier slices take the remainder.
std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t parts);

// Shuffled edges and an equal number of uniformly sampled distinct non-edges,
// each split into `parts` folds. Throws PreconditionError below `parts` edges
// and Error when the graph lacks enough non-edges.
FoldPlan make_folds(const SimpleGraph& g, std::uint64_t seed, std::size_t parts = 5);

// Graph on the positives of every fold except `held_out`.
SimpleGraph training_graph(const SimpleGraph& g, const FoldPlan& plan, std::size_t held_out);

// Negatives of every fold except `held_out`.
std::vector<NodePair> training_negatives(const FoldPlan& plan, std::size_t held_out);

}  // namespace ontolink
