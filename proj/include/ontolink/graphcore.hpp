#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ontolink/graph.hpp"

namespace ontolink {

// Sum over common neighbours x of 1 / ln|N(x)|.
double adamic_adar(const SimpleGraph& g, NodeId u, NodeId v);
// |N(u) & N(v)| / |N(u) | N(v)|; 0 when both neighbourhoods are empty.
double jaccard(const SimpleGraph& g, NodeId u, NodeId v);
// |N(u)| * |N(v)|
double preferential(const SimpleGraph& g, NodeId u, NodeId v);

std::size_t common_neighbor_count(const SimpleGraph& g, NodeId u, NodeId v);

// What a scorer may see while fitting one benchmark fold.
struct FitContext {
  const SimpleGraph& graph;
  const HeteroGraph* hetero = nullptr;  // restricted to training edges when present
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::span<const NodePair> training_negatives = {};
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual void fit(const FitContext& context) = 0;
  virtual double score(NodeId u, NodeId v) const = 0;
  // Scorers that consume FitContext::training_negatives.
  virtual bool wants_negatives() const { return false; }
};

// Stateless proximity scorers; fit only keeps a copy of the graph.
class ProximityScorer final : public Scorer {
 public:
  using Formula = double (*)(const SimpleGraph&, NodeId, NodeId);
  ProximityScorer(std::string name, Formula formula) : name_(std::move(name)), formula_(formula) {}

  std::string name() const override { return name_; }
  void fit(const FitContext& context) override { graph_ = context.graph; }
  double score(NodeId u, NodeId v) const override { return formula_(graph_, u, v); }

 private:
  std::string name_;
  Formula formula_;
  SimpleGraph graph_;
};

// Uniform noise, keyed on the pair so repeated calls agree.
class RandomScorer final : public Scorer {
 public:
  std::string name() const override { return "random"; }
  void fit(const FitContext& context) override { seed_ = context.seed; }
  double score(NodeId u, NodeId v) const override;

 private:
  std::uint64_t seed_ = 0;
};

// Rescales to [0, 1] over the given set; a constant input maps to all zeros.
template <typename Scalar>
std::vector<Scalar> min_max_normalize(std::span<const Scalar> scores) {
  std::vector<Scalar> out(scores.begin(), scores.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  const Scalar low = *lo;
  const Scalar range = *hi - *lo;
  for (auto& s : out) s = range > Scalar(0) ? (s - low) / range : Scalar(0);
  return out;
}

// Rows P of the pairwise score matrix, either materialised as a dense
// |P| x |N| block or evaluated lazily pair by pair.
class ScoreMatrixView {
 public:
  using PairFn = std::function<double(NodeId, NodeId)>;

  ScoreMatrixView(std::vector<NodeId> rows, std::size_t columns, PairFn lazy);
  ScoreMatrixView(std::vector<NodeId> rows, Eigen::MatrixXd dense);

  // Evaluates every entry of a lazy view into a dense block.
  static ScoreMatrixView materialize(std::vector<NodeId> rows, std::size_t columns, const PairFn& fn);

  std::span<const NodeId> row_index() const { return rows_; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t columns() const { return columns_; }
  bool is_dense() const { return !lazy_; }

  // Entry for (row_index()[row], column); the diagonal reads as 0.
  double operator()(std::size_t row, NodeId column) const {
    if (lazy_) return rows_[row] == column ? 0.0 : lazy_(rows_[row], column);
    return dense_(static_cast<Eigen::Index>(row), column);
  }

 private:
  std::vector<NodeId> rows_;
  std::size_t columns_ = 0;
  PairFn lazy_;
  Eigen::MatrixXd dense_;
};

}  // namespace ontolink
