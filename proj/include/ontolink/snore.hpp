#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/SparseCore>
#include <json.hpp>

#include "ontolink/graph.hpp"
#include "ontolink/graphcore.hpp"

namespace ontolink {

struct SnoreParams {
  int walks_per_node = 1024;
  int max_len = 5;             // walk lengths are drawn uniformly from 1..max_len
  double threshold = 0.005;    // smallest similarity kept
  int nnz_cap_per_node = 256;  // top entries kept per row
  std::uint64_t seed = 42;
  // 0 hashes visited nodes by identity; otherwise into this many buckets.
  std::size_t hash_buckets = 0;
  unsigned threads = 0;
};

nlohmann::json to_json(const SnoreParams& params);

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

// Row-sparse |N| x |F| similarity matrix R. Column f is node f.
struct SparseEmbedding {
  SparseRows rows;
  std::vector<std::string> feature_names;
  SnoreParams params;

  std::size_t node_count() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t feature_count() const { return static_cast<std::size_t>(rows.cols()); }
  std::size_t nnz() const { return static_cast<std::size_t>(rows.nonZeros()); }
};

// Hashed random-walk neighbourhood of one node: sorted (bucket, weight)
// entries, L1-normalised.
struct WalkProfile {
  std::vector<std::uint32_t> index;
  std::vector<double> weight;
};

WalkProfile walk_profile(const SimpleGraph& g, NodeId start, const SnoreParams& params);

// R[u][f] = cosine(h(u), h(f)), thresholded and truncated per row.
// Bit-identical for a given seed at any thread count.
SparseEmbedding snore_fit(const SimpleGraph& g, const SnoreParams& params,
                          std::vector<std::string> feature_names = {});

// Sparse dot product of rows u and v, summed in ascending feature order.
double snore_score(const SparseEmbedding& embedding, NodeId u, NodeId v);

template <typename Scalar, int Options, typename Index>
Scalar sparse_row_dot(const Eigen::SparseMatrix<Scalar, Options, Index>& m, Index a, Index b) {
  static_assert(Options & Eigen::RowMajor, "row access needs a row-major matrix");
  typename Eigen::SparseMatrix<Scalar, Options, Index>::InnerIterator i(m, a), j(m, b);
  Scalar sum(0);
  while (i && j) {
    if (i.index() < j.index()) {
      ++i;
    } else if (j.index() < i.index()) {
      ++j;
    } else {
      sum += i.value() * j.value();
      ++i;
      ++j;
    }
  }
  return sum;
}

class SnoreScorer final : public Scorer {
 public:
  explicit SnoreScorer(SnoreParams params = {}) : params_(params) {}
  std::string name() const override { return "snore"; }
  void fit(const FitContext& context) override;
  double score(NodeId u, NodeId v) const override { return snore_score(embedding_, u, v); }
  const SparseEmbedding& embedding() const { return embedding_; }

 private:
  SnoreParams params_;
  SparseEmbedding embedding_;
};

}  // namespace ontolink
