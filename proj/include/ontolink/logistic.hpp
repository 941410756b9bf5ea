#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ontolink/errors.hpp"

namespace ontolink {

template <typename Scalar>
struct LogisticFit {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector beta;
  Vector se;          // sqrt(diag((X^T W X + ridge I)^-1)) at beta
  Vector t;           // beta / se
  Matrix covariance;  // (X^T W X + ridge I)^-1
  Scalar ridge = 0;
  int iterations = 0;
  Scalar gradient_norm = 0;
};

struct LogisticOptions {
  double ridge = 1e-6;
  int max_iterations = 100;
  double tolerance = 1e-10;  // on the Newton step's max-abs entry
};

// W_jj = e^{x_j.beta} / (1 + e^{x_j.beta})^2, written in an overflow-safe form.
template <typename Derived>
auto logistic_weights(const Eigen::MatrixBase<Derived>& eta) {
  using Scalar = typename Derived::Scalar;
  return eta.unaryExpr([](Scalar z) {
           const Scalar e = std::exp(-std::abs(z));
           return e / ((Scalar(1) + e) * (Scalar(1) + e));
         })
      .eval();
}

template <typename Derived>
auto logistic_mean(const Eigen::MatrixBase<Derived>& eta) {
  using Scalar = typename Derived::Scalar;
  return eta.unaryExpr([](Scalar z) {
           return z >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-z)) : std::exp(z) / (Scalar(1) + std::exp(z));
         })
      .eval();
}

// X^T diag(w) X for dense and sparse designs.
template <typename Derived, typename Vector>
auto weighted_gram(const Eigen::MatrixBase<Derived>& X, const Vector& w) {
  using Scalar = typename Derived::Scalar;
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(X.transpose() * w.asDiagonal() * X);
}

template <typename Derived, typename Vector>
auto weighted_gram(const Eigen::SparseMatrixBase<Derived>& X, const Vector& w) {
  using Scalar = typename Derived::Scalar;
  const Eigen::SparseMatrix<Scalar> xt_w_x = X.transpose() * (w.asDiagonal() * X.derived());
  return Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>(xt_w_x.toDense());
}

// Logistic regression without intercept by IRLS (Newton) with a ridge term:
// beta <- beta + (X^T W X + ridge I)^-1 (X^T (y - mu) - ridge beta).
// Throws Error when the system is not positive definite and ConvergenceError
// (carrying the gradient norm) when the iteration cap is hit.
template <typename XType, typename YDerived>
LogisticFit<typename YDerived::Scalar> fit_logistic(const XType& X, const Eigen::MatrixBase<YDerived>& y,
                                                    const LogisticOptions& options = {}) {
  using Scalar = typename YDerived::Scalar;
  using Fit = LogisticFit<Scalar>;
  using Vector = typename Fit::Vector;
  using Matrix = typename Fit::Matrix;

  const Eigen::Index p = X.cols();
  if (X.rows() != y.rows()) throw PreconditionError("design and response lengths differ");
  const Scalar ridge = static_cast<Scalar>(options.ridge);
  const Matrix ridge_eye = ridge * Matrix::Identity(p, p);

  Fit fit;
  fit.ridge = ridge;
  fit.beta = Vector::Zero(p);
  Vector gradient(p);
  for (fit.iterations = 1; fit.iterations <= options.max_iterations; ++fit.iterations) {
    const Vector eta = X * fit.beta;
    const Vector mu = logistic_mean(eta);
    const Vector w = logistic_weights(eta);
    gradient = X.transpose() * (y - mu) - ridge * fit.beta;
    const Eigen::LDLT<Matrix> solver(weighted_gram(X, w) + ridge_eye);
    if (solver.info() != Eigen::Success || !solver.isPositive() || (solver.vectorD().array() <= 0).any()) {
      throw Error("X^T W X is singular; increase the ridge term (currently " + std::to_string(options.ridge) + ")");
    }
    const Vector step = solver.solve(gradient);
    fit.beta += step;
    if (!fit.beta.allFinite()) throw Error("logistic fit diverged");
    if (step.cwiseAbs().maxCoeff() <= static_cast<Scalar>(options.tolerance)) break;
  }
  if (fit.iterations > options.max_iterations) {
    throw ConvergenceError("logistic fit did not converge", static_cast<double>(gradient.norm()));
  }

  const Vector eta = X * fit.beta;
  const Vector w = logistic_weights(eta);
  gradient = X.transpose() * (y - logistic_mean(eta)) - ridge * fit.beta;
  fit.gradient_norm = gradient.norm();
  const Eigen::LDLT<Matrix> solver(weighted_gram(X, w) + ridge_eye);
  fit.covariance = solver.solve(Matrix::Identity(p, p));
  fit.se = fit.covariance.diagonal().cwiseSqrt();
  fit.t = fit.beta.cwiseQuotient(fit.se);
  return fit;
}

}  // namespace ontolink
