#include "ontolink/graphcore.hpp"

#include <cassert>
#include <cmath>

#include "ontolink/errors.hpp"
#include "ontolink/random.hpp"

namespace ontolink {

namespace {

// Calls fn(x) for every x in N(u) & N(v), ascending.
template <typename Fn>
void for_common_neighbors(const SimpleGraph& g, NodeId u, NodeId v, Fn&& fn) {
  auto a = g.neighbors(u);
  auto b = g.neighbors(v);
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      fn(*i);
      ++i;
      ++j;
    }
  }
}

}  // namespace

std::size_t common_neighbor_count(const SimpleGraph& g, NodeId u, NodeId v) {
  std::size_t n = 0;
  for_common_neighbors(g, u, v, [&](NodeId) { ++n; });
  return n;
}

double adamic_adar(const SimpleGraph& g, NodeId u, NodeId v) {
  double sum = 0.0;
  for_common_neighbors(g, u, v, [&](NodeId x) {
    // x neighbours both u and v, so |N(x)| >= 2 unless u == v.
    assert(g.degree(x) >= 2 || u == v);
    sum += 1.0 / std::log(static_cast<double>(g.degree(x)));
  });
  return sum;
}

double jaccard(const SimpleGraph& g, NodeId u, NodeId v) {
  const std::size_t common = common_neighbor_count(g, u, v);
  const std::size_t unite = g.degree(u) + g.degree(v) - common;
  return unite == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unite);
}

double preferential(const SimpleGraph& g, NodeId u, NodeId v) {
  return static_cast<double>(g.degree(u)) * static_cast<double>(g.degree(v));
}

double RandomScorer::score(NodeId u, NodeId v) const {
  const auto pair = NodePair::canonical(u, v);
  const std::uint64_t h = mix_seed(seed_, (static_cast<std::uint64_t>(pair.u) << 32) | pair.v);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

ScoreMatrixView::ScoreMatrixView(std::vector<NodeId> rows, std::size_t columns, PairFn lazy)
    : rows_(std::move(rows)), columns_(columns), lazy_(std::move(lazy)) {
  if (!lazy_) throw PreconditionError("lazy score view needs an evaluator");
  for (NodeId r : rows_) {
    if (r >= columns_) throw PreconditionError("row node " + std::to_string(r) + " outside the node range");
  }
}

ScoreMatrixView::ScoreMatrixView(std::vector<NodeId> rows, Eigen::MatrixXd dense)
    : rows_(std::move(rows)), columns_(static_cast<std::size_t>(dense.cols())), dense_(std::move(dense)) {
  if (static_cast<std::size_t>(dense_.rows()) != rows_.size()) {
    throw PreconditionError("dense score block has the wrong number of rows");
  }
  if (!dense_.allFinite()) throw PreconditionError("score block contains non-finite entries");
}

ScoreMatrixView ScoreMatrixView::materialize(std::vector<NodeId> rows, std::size_t columns, const PairFn& fn) {
  Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r] == c ? 0.0 : fn(rows[r], static_cast<NodeId>(c));
    }
  }
  return ScoreMatrixView(std::move(rows), std::move(block));
}

}  // namespace ontolink
