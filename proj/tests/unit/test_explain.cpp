#include <doctest.h>

#include <random>

#include "ontolink/errors.hpp"
#include "ontolink/explain.hpp"
#include "ontolink/logistic.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace ontolink;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

// Gaussian design; only column 0 drives the label.
Problem planted(int rows, int cols, double beta0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  Problem p{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) p.X(i, j) = normal(rng);
    p.y[i] = uniform(rng) < 1.0 / (1.0 + std::exp(-beta0 * p.X(i, 0))) ? 1.0 : 0.0;
  }
  return p;
}

}  // namespace

TEST_SUITE("explain") {
  TEST_CASE("weights are a quarter at zero and symmetric") {
    Eigen::VectorXd eta(4);
    eta << 0.0, 2.0, -2.0, 800.0;
    const Eigen::VectorXd w = logistic_weights(eta);
    CHECK(w[0] == 0.25);
    CHECK(w[1] == doctest::Approx(std::exp(2.0) / std::pow(1 + std::exp(2.0), 2)));
    CHECK(w[1] == w[2]);
    CHECK(w[3] == 0.0);
    const Eigen::VectorXd mu = logistic_mean(eta);
    CHECK(mu[0] == 0.5);
    CHECK(mu[1] + mu[2] == doctest::Approx(1.0));
    CHECK(std::isfinite(logistic_mean(Eigen::VectorXd::Constant(1, -800.0))[0]));
  }

  TEST_CASE("dense and sparse gram agree") {
    const auto p = planted(50, 4, 1.0, 3);
    const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(50, 0.1, 0.2);
    const Eigen::SparseMatrix<double> sparse = p.X.sparseView();
    CHECK((weighted_gram(p.X, w) - weighted_gram(sparse, w)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("IRLS matches a Newton reference with an explicit inverse") {
    const auto p = planted(400, 5, 1.5, 7);
    const auto fit = fit_logistic(p.X, p.y, {.ridge = 1e-3, .max_iterations = 100, .tolerance = 1e-12});
    const auto ref = oracle::reference_newton(p.X, p.y, 1e-3, 30);
    CHECK((fit.beta - ref.beta).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((fit.se - ref.se).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(fit.gradient_norm < 1e-8);
    for (int j = 0; j < 5; ++j) CHECK(fit.t[j] == doctest::Approx(fit.beta[j] / fit.se[j]));
  }

  TEST_CASE("single precision design") {
    const auto p = planted(200, 3, 1.0, 2);
    const Eigen::MatrixXf X = p.X.cast<float>();
    const Eigen::VectorXf y = p.y.cast<float>();
    const auto fit = fit_logistic(X, y, {.ridge = 1e-3, .max_iterations = 100, .tolerance = 1e-4});
    const auto ref = fit_logistic(p.X, p.y, {.ridge = 1e-3, .max_iterations = 100, .tolerance = 1e-10});
    CHECK((fit.beta.cast<double>() - ref.beta).cwiseAbs().maxCoeff() < 1e-3);
  }

  TEST_CASE("separable data hits the iteration cap") {
    Eigen::MatrixXd X(4, 1);
    X << 1, 2, -1, -2;
    Eigen::VectorXd y(4);
    y << 1, 1, 0, 0;
    try {
      fit_logistic(X, y, {.ridge = 0.0, .max_iterations = 5, .tolerance = 1e-10});
      FAIL("expected non-convergence");
    } catch (const ConvergenceError& e) {
      CHECK(e.residual() > 0.0);
    }
  }

  TEST_CASE("singular system without ridge") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 1, 2, 2, 3, 3;
    Eigen::VectorXd y(3);
    y << 1, 0, 1;
    CHECK_THROWS_AS(fit_logistic(X, y, {.ridge = 0.0, .max_iterations = 10, .tolerance = 1e-10}), Error);
    CHECK_THROWS_AS(fit_logistic(X, Eigen::VectorXd(2), {}), PreconditionError);
  }

  TEST_CASE("global explanation ranks the planted feature first") {
    const auto p = planted(1000, 6, 2.0, 11);
    const DesignMatrix X = p.X.sparseView();
    const std::vector<std::uint32_t> ids{10, 11, 12, 13, 14, 15};
    const auto g = explain_global(X, p.y, ids, {});
    REQUIRE(g.features.size() == 6);
    CHECK(g.features[0].feature == 10);
    for (std::size_t i = 1; i < g.features.size(); ++i) {
      CHECK(std::abs(g.features[i - 1].t) >= std::abs(g.features[i].t));
    }
    CHECK(g.training_rows == 1000);
  }

  TEST_CASE("max_features keeps the most used columns") {
    DesignMatrix X(4, 3);
    std::vector<Eigen::Triplet<double, int>> t{{0, 0, 1.0}, {1, 0, 0.5}, {2, 0, 0.2}, {3, 0, 0.7},
                                               {0, 1, 1.0}, {2, 1, 0.3}, {3, 2, 0.4}};
    X.setFromTriplets(t.begin(), t.end());
    Eigen::VectorXd y(4);
    y << 1, 0, 1, 0;
    GlobalOptions o;
    o.max_features = 2;
    o.fit.ridge = 1e-2;
    const auto g = explain_global(X, y, {0, 1, 2}, o);
    std::vector<std::uint32_t> kept;
    for (const auto& f : g.features) kept.push_back(f.feature);
    std::sort(kept.begin(), kept.end());
    CHECK(kept == std::vector<std::uint32_t>{0, 1});
  }

  TEST_CASE("global explanation of an embedding") {
    const auto g = testing_support::block_model(2, 40, 0.3, 0.02, 5);
    SnoreParams p;
    p.walks_per_node = 256;
    const auto e = snore_fit(g, p);
    GlobalOptions o;
    o.fit.ridge = 1e-2;
    const auto ex = explain_global(e, g, o);
    CHECK_FALSE(ex.features.empty());
    CHECK(ex.features.size() <= e.feature_count());
    const auto j = to_json(ex, e.feature_names, 3);
    CHECK(j["features"].size() == 3);
    CHECK(j["features"][0].contains("abs_t"));
  }

  TEST_CASE("local contributions sum to the score") {
    const auto g = testing_support::erdos_renyi(60, 0.08, 3);
    const auto e = snore_fit(g, {});
    for (NodeId u = 0; u < 60; u += 5) {
      for (NodeId v = 1; v < 60; v += 9) {
        const auto ex = explain_local(e, u, v);
        CHECK(ex.total == snore_score(e, u, v));
        double sum = 0;
        for (const auto& c : ex.contributions) {
          sum += c.value;
          CHECK(c.value > 0.0);
        }
        CHECK(sum == doctest::Approx(ex.total).epsilon(1e-12));
        CHECK(std::is_sorted(ex.contributions.begin(), ex.contributions.end(),
                             [](const Contribution& a, const Contribution& b) { return a.value > b.value; }));
        const auto ru = e.rows.row(u).nonZeros(), rv = e.rows.row(v).nonZeros();
        CHECK(ex.support_union <= static_cast<std::size_t>(ru + rv));
      }
    }
    CHECK_THROWS_AS(explain_local(e, 60, 0), PreconditionError);
  }

  TEST_CASE("weighted contributions use the global betas") {
    SnoreParams p;
    const auto g = testing_support::erdos_renyi(20, 0.2, 1);
    const auto e = snore_fit(g, p);
    GlobalExplanation global;
    global.features = {{0, 2.0, 1.0, 2.0}, {5, -1.0, 1.0, -1.0}};
    const auto plain = explain_local(e, 0, 5);
    const auto w = explain_local_weighted(e, 0, 5, global);
    CHECK(w.weighted);
    double expected = 0;
    for (const auto& c : plain.contributions) {
      if (c.feature == 0) expected += 2.0 * c.value;
      if (c.feature == 5) expected -= c.value;
    }
    CHECK(w.total == doctest::Approx(expected));
    for (const auto& c : w.contributions) CHECK((c.feature == 0 || c.feature == 5));
  }

  TEST_CASE("histogram bins") {
    LocalExplanation e;
    e.contributions = {{1, 0.9}, {2, 0.5}, {3, 0.45}, {4, 0.1}};
    e.support_union = 6;
    const auto h = contribution_histogram(e, 3);
    CHECK(h.lo == 0.0);
    CHECK(h.hi == 0.9);
    CHECK(h.counts == std::vector<std::size_t>{1, 2, 1});
    CHECK(h.zero_count == 2);
    const auto one = contribution_histogram(e, 1);
    CHECK(one.counts == std::vector<std::size_t>{4});
    CHECK_THROWS_AS(contribution_histogram(e, 0), PreconditionError);
    const auto empty = contribution_histogram(LocalExplanation{}, 4);
    CHECK(empty.counts == std::vector<std::size_t>(4, 0));
  }

  TEST_CASE("negative weighted contributions widen the range") {
    LocalExplanation e;
    e.contributions = {{1, 0.4}, {2, -0.4}};
    e.support_union = 2;
    const auto h = contribution_histogram(e, 2);
    CHECK(h.lo == -0.4);
    CHECK(h.counts == std::vector<std::size_t>{1, 1});
  }
}
