#include "ontolink/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ontolink/errors.hpp"
#include "ontolink/random.hpp"

namespace ontolink {

Eigen::SparseMatrix<double> normalized_laplacian(const SimpleGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  std::vector<double> inv_sqrt(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    inv_sqrt[u] = g.degree(u) ? 1.0 / std::sqrt(static_cast<double>(g.degree(u))) : 0.0;
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * g.edge_count() + g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) == 0) continue;
    entries.emplace_back(u, u, 1.0);
    for (NodeId v : g.neighbors(u)) entries.emplace_back(u, v, -inv_sqrt[u] * inv_sqrt[v]);
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(entries.begin(), entries.end());
  return lap;
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix orthonormalize(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
}

Vector residuals(const Eigen::SparseMatrix<double>& lap, const Matrix& vectors, const Vector& values) {
  Matrix r = lap * vectors - vectors * values.asDiagonal();
  return r.colwise().norm().transpose();
}

// Eigenvectors are defined up to sign; make the largest-magnitude entry positive.
void fix_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index at = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&at);
    if (vectors(at, c) < 0) vectors.col(c) *= -1.0;
  }
}

void solve_dense(const Eigen::SparseMatrix<double>& lap, int d, Vector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver{Matrix(lap)};
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", -1.0);
  values = solver.eigenvalues().head(d);
  vectors = solver.eigenvectors().leftCols(d);
}

// Chebyshev-filtered subspace iteration: damps the unwanted part of the
// spectrum [cut, 2] while keeping the low end.
void solve_subspace(const Eigen::SparseMatrix<double>& lap, const SpectralParams& p, Vector& values, Matrix& vectors) {
  const Eigen::Index n = lap.rows();
  const int d = p.dimensions;
  const Eigen::Index block = std::min<Eigen::Index>(n, d + std::max(10, d / 4));

  Rng rng = make_rng(p.seed, 0x5eed);
  std::normal_distribution<double> gauss;
  Matrix x(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = gauss(rng);
  }
  x = orthonormalize(x);

  constexpr double upper = 2.0;  // spectrum of the normalised Laplacian lies in [0, 2]
  double worst = 0.0;
  for (int iter = 0; iter < p.max_iterations; ++iter) {
    Matrix h = x.transpose() * (lap * x);
    Eigen::SelfAdjointEigenSolver<Matrix> ritz(0.5 * (h + h.transpose()));
    x = x * ritz.eigenvectors();
    const Vector theta = ritz.eigenvalues();

    values = theta.head(d);
    vectors = x.leftCols(d);
    worst = residuals(lap, vectors, values).maxCoeff();
    if (worst <= p.tolerance) return;

    const double cut = theta(block - 1);
    const double low = std::min(0.0, theta(0));
    if (cut >= upper) break;
    const double e = (upper - cut) / 2.0;
    const double c = (upper + cut) / 2.0;
    double sigma = e / (low - c);
    const double tau = 2.0 / sigma;
    Matrix y = (lap * x - c * x) * (sigma / e);
    for (int k = 2; k <= p.filter_degree; ++k) {
      const double next_sigma = 1.0 / (tau - sigma);
      Matrix next = (lap * y - c * y) * (2.0 * next_sigma / e) - (sigma * next_sigma) * x;
      x = std::move(y);
      y = std::move(next);
      sigma = next_sigma;
    }
    x = orthonormalize(y);
  }
  throw ConvergenceError("subspace eigensolver did not converge; residual " + std::to_string(worst), worst);
}

}  // namespace

SpectralEmbedding spectral_fit(const SimpleGraph& g, const SpectralParams& params) {
  const auto n = g.node_count();
  if (params.dimensions < 1) throw PreconditionError("spectral dimension must be positive");
  if (static_cast<std::size_t>(params.dimensions) >= n) {
    throw PreconditionError("spectral dimension must be smaller than the node count");
  }
  const auto lap = normalized_laplacian(g);

  SpectralEmbedding out;
  const bool dense = params.solver == EigenSolverKind::Dense ||
                     (params.solver == EigenSolverKind::Auto && n <= params.dense_limit);
  if (dense) {
    solve_dense(lap, params.dimensions, out.eigenvalues, out.eigenvectors);
  } else {
    solve_subspace(lap, params, out.eigenvalues, out.eigenvectors);
  }
  fix_signs(out.eigenvectors);
  out.max_residual = residuals(lap, out.eigenvectors, out.eigenvalues).maxCoeff();

  out.coordinates = out.eigenvectors;
  for (Eigen::Index i = 0; i < out.coordinates.rows(); ++i) {
    const double norm = out.coordinates.row(i).norm();
    if (norm > 0.0) out.coordinates.row(i) /= norm;
  }
  return out;
}

void SpectralScorer::fit(const FitContext& context) {
  SpectralParams p = params_;
  p.seed = context.seed;
  const auto n = context.graph.node_count();
  if (n < 2) throw PreconditionError("spectral embedding needs at least two nodes");
  p.dimensions = std::min<int>(p.dimensions, static_cast<int>(n) - 1);
  embedding_ = spectral_fit(context.graph, p);
}

}  // namespace ontolink
