#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ontolink/graph.hpp"
#include "ontolink/logistic.hpp"
#include "ontolink/snore.hpp"

namespace ontolink {

struct FeatureImportance {
  std::uint32_t feature = 0;  // column of R
  double beta = 0;
  double se = 0;
  double t = 0;
};

struct GlobalExplanation {
  std::vector<FeatureImportance> features;  // descending |t|, ties by feature id
  double ridge = 0;
  int iterations = 0;
  double gradient_norm = 0;
  std::size_t training_rows = 0;
};

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::size_t max_features = 1000;
  LogisticOptions fit;
};

using DesignMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Training rows R_u .* R_v for fold 0 of make_folds(g, seed), label 1 for
// edges and 0 for sampled non-edges.
GlobalExplanation explain_global(const SparseEmbedding& embedding, const SimpleGraph& g, const GlobalOptions& options);

// Fits on a prepared design. Columns are kept by how many rows use them
// (at most options.max_features); `feature_ids` maps design columns to
// reported feature ids.
GlobalExplanation explain_global(const DesignMatrix& X, const Eigen::VectorXd& y,
                                 const std::vector<std::uint32_t>& feature_ids, const GlobalOptions& options);

struct Contribution {
  std::uint32_t feature = 0;
  double value = 0;
};

struct LocalExplanation {
  NodeId u = 0;
  NodeId v = 0;
  std::vector<Contribution> contributions;  // nonzero products, descending, ties by feature id
  double total = 0;                         // equals snore_score(R, u, v) when unweighted
  std::size_t support_union = 0;            // features in either row
  bool weighted = false;
};

LocalExplanation explain_local(const SparseEmbedding& embedding, NodeId u, NodeId v);

// Products scaled by the global fit's beta; features outside the fit get
// weight 0. The sum no longer equals the pair score.
LocalExplanation explain_local_weighted(const SparseEmbedding& embedding, NodeId u, NodeId v,
                                        const GlobalExplanation& global);

struct Histogram {
  double lo = 0;
  double hi = 0;
  std::vector<std::size_t> counts;
  std::size_t zero_count = 0;  // features in either support whose product is 0
};

// Equal-width bins over [min(0, smallest), largest contribution]; the top
// edge falls in the last bin.
Histogram contribution_histogram(const LocalExplanation& explanation, int bins);

nlohmann::json to_json(const GlobalExplanation& g, const std::vector<std::string>& names, std::size_t top);
nlohmann::json to_json(const LocalExplanation& e, const std::vector<std::string>& names);
nlohmann::json to_json(const Histogram& h);

}  // namespace ontolink
