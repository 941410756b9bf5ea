#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ontolink/graph.hpp"
#include "ontolink/graphcore.hpp"

namespace ontolink {

struct TransEParams {
  int dimensions = 64;
  double margin = 1.0;
  double learning_rate = 0.01;
  int epochs = 200;
  int negatives_per_positive = 1;
  std::uint64_t seed = 42;
};

template <typename Scalar>
struct BasicKGEmbedding {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Matrix entities;   // |N| x d, unit rows after every epoch
  Matrix relations;  // |predicates| x d
  std::vector<double> epoch_loss;
  std::vector<double> epoch_norm_error;  // max | ||e|| - 1 | after each epoch's renormalisation

  Eigen::Index dimensions() const { return entities.cols(); }
};

using KGEmbedding = BasicKGEmbedding<double>;

// Margin ranking loss over head/tail corruptions, plain SGD, L2 distance.
// Throws PreconditionError for an empty graph or d < 1, Error on a
// non-finite epoch loss.
KGEmbedding transe_fit(const HeteroGraph& graph, const TransEParams& params);

// -||e_s + r_p - e_o||; 0 is the best possible score.
template <typename Scalar>
Scalar transe_triple_score(const BasicKGEmbedding<Scalar>& e, NodeId s, Eigen::Index p, NodeId o) {
  return -(e.entities.row(s) + e.relations.row(p) - e.entities.row(o)).norm();
}

// Best triple score over every relation and both orientations.
template <typename Scalar>
Scalar transe_score(const BasicKGEmbedding<Scalar>& e, NodeId u, NodeId v) {
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index p = 0; p < e.relations.rows(); ++p) {
    best = std::max({best, transe_triple_score(e, u, p, v), transe_triple_score(e, v, p, u)});
  }
  return best;
}

class TransEScorer final : public Scorer {
 public:
  explicit TransEScorer(TransEParams params = {}) : params_(params) {}
  std::string name() const override { return "transe"; }
  // Trains on FitContext::hetero, or on the simple graph as a single relation.
  void fit(const FitContext& context) override;
  double score(NodeId u, NodeId v) const override { return transe_score(embedding_, u, v); }
  const KGEmbedding& embedding() const { return embedding_; }

 private:
  TransEParams params_;
  KGEmbedding embedding_;
};

}  // namespace ontolink
