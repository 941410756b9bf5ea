#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ontolink/graph.hpp"
#include "ontolink/graphcore.hpp"

namespace ontolink {

enum class EigenSolverKind {
  Auto,       // dense up to SpectralParams::dense_limit nodes, filtered subspace iteration above
  Dense,
  Subspace,
};

struct SpectralParams {
  int dimensions = 128;
  std::uint64_t seed = 42;
  EigenSolverKind solver = EigenSolverKind::Auto;
  std::size_t dense_limit = 1000;
  int max_iterations = 300;
  int filter_degree = 16;
  double tolerance = 1e-8;  // per-pair residual ||Lx - lambda x||
};

template <typename Scalar>
struct BasicSpectralEmbedding {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector eigenvalues;  // ascending
  Matrix eigenvectors; // |N| x d, orthonormal columns
  Matrix coordinates;  // eigenvectors with L2-normalised rows
  Scalar max_residual = 0;
};

using SpectralEmbedding = BasicSpectralEmbedding<double>;

// D^-1/2 (D - A) D^-1/2, with zero rows for isolated nodes.
Eigen::SparseMatrix<double> normalized_laplacian(const SimpleGraph& g);

// Eigenpairs for the d smallest eigenvalues. Throws ConvergenceError (carrying
// the residual) when the iterative solver hits its iteration cap.
SpectralEmbedding spectral_fit(const SimpleGraph& g, const SpectralParams& params);

template <typename Scalar>
Scalar spectral_score(const BasicSpectralEmbedding<Scalar>& e, NodeId u, NodeId v) {
  return e.coordinates.row(u).dot(e.coordinates.row(v));
}

class SpectralScorer final : public Scorer {
 public:
  explicit SpectralScorer(SpectralParams params = {}) : params_(params) {}
  std::string name() const override { return "spectral"; }
  // Clamps the dimension to |N| - 1 on small training graphs.
  void fit(const FitContext& context) override;
  double score(NodeId u, NodeId v) const override { return spectral_score(embedding_, u, v); }

 private:
  SpectralParams params_;
  SpectralEmbedding embedding_;
};

}  // namespace ontolink
