#include <doctest.h>

#include <random>
#include <set>

#include "ontolink/benchmark.hpp"
#include "ontolink/errors.hpp"
#include "ontolink/folds.hpp"
#include "ontolink/metrics.hpp"
#include "ontolink/scorers.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace ontolink;

namespace {

// Scorer that fails on a chosen fold, to exercise failure isolation.
class FlakyScorer final : public Scorer {
 public:
  std::string name() const override { return "flaky"; }
  void fit(const FitContext& c) override {
    if (++fits_ == 2) throw Error("boom");
    (void)c;
  }
  double score(NodeId u, NodeId v) const override { return static_cast<double>(u + v); }

 private:
  int fits_ = 0;
};

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("auc and ap on hand-checked rankings") {
    CHECK(roc_auc<double>({3, 2}, {1, 0}) == 1.0);
    CHECK(roc_auc<double>({0}, {1}) == 0.0);
    CHECK(roc_auc<double>({1}, {1}) == 0.5);
    CHECK(average_precision<double>({3, 2}, {1, 0}) == 1.0);
    // Ranking + - +: (1/1 + 2/3) / 2.
    CHECK(average_precision<double>({3, 1}, {2}) == doctest::Approx(5.0 / 6.0));
    // One positive tied with one negative: either order is equally likely.
    CHECK(average_precision<double>({1}, {1}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(roc_auc<double>({}, {1}), PreconditionError);
    CHECK_THROWS_AS(average_precision<double>({1}, {}), PreconditionError);
  }

  TEST_CASE("metrics match brute force on random tie-free scores") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    std::uniform_int_distribution<int> size(1, 30);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> pos(size(rng)), neg(size(rng));
      for (auto& x : pos) x = u(rng);
      for (auto& x : neg) x = u(rng);
      CHECK(roc_auc(pos, neg) == doctest::Approx(oracle::brute_auc(pos, neg)).epsilon(1e-12));
      CHECK(average_precision(pos, neg) == doctest::Approx(oracle::cumulative_ap(pos, neg)).epsilon(1e-12));
    }
  }

  TEST_CASE("tied scores: auc gives half credit, ap is the mean over tie orders") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> level(0, 2), size(1, 4);
    for (int trial = 0; trial < 150; ++trial) {
      std::vector<double> pos(size(rng)), neg(size(rng));
      for (auto& x : pos) x = level(rng);
      for (auto& x : neg) x = level(rng);
      CHECK(roc_auc(pos, neg) == doctest::Approx(oracle::brute_auc(pos, neg)).epsilon(1e-12));
      CHECK(average_precision(pos, neg) == doctest::Approx(oracle::tie_permutation_ap(pos, neg)).epsilon(1e-12));
    }
  }

  TEST_CASE("metrics do not depend on input order") {
    std::vector<double> pos{0.3, 0.3, 0.9, 0.1}, neg{0.3, 0.2, 0.9};
    const double auc = roc_auc(pos, neg), ap = average_precision(pos, neg);
    std::reverse(pos.begin(), pos.end());
    std::reverse(neg.begin(), neg.end());
    CHECK(roc_auc(pos, neg) == auc);
    CHECK(average_precision(pos, neg) == ap);
  }

  TEST_CASE("float scores") {
    std::vector<float> pos{0.9f, 0.4f}, neg{0.5f};
    CHECK(roc_auc(pos, neg) == 0.5);
  }

  TEST_CASE("fold sizes") {
    CHECK(fold_sizes(10, 5) == std::vector<std::size_t>{2, 2, 2, 2, 2});
    CHECK(fold_sizes(12, 5) == std::vector<std::size_t>{3, 3, 2, 2, 2});
    CHECK(fold_sizes(3, 3) == std::vector<std::size_t>{1, 1, 1});
  }

  TEST_CASE("fold invariants") {
    const auto g = testing_support::erdos_renyi(80, 0.08, 3);
    const auto plan = make_folds(g, 7);
    REQUIRE(plan.folds.size() == 5);
    std::set<NodePair> pos, neg;
    for (const auto& f : plan.folds) {
      CHECK(f.positives.size() == f.negatives.size());
      for (auto e : f.positives) CHECK(pos.insert(e).second);
      for (auto e : f.negatives) {
        CHECK(neg.insert(e).second);
        CHECK_FALSE(g.has_edge(e.u, e.v));
        CHECK(e.u < e.v);
      }
    }
    CHECK(pos.size() == g.edge_count());
    CHECK(plan.n_pos == plan.n_neg);
    const auto again = make_folds(g, 7);
    for (std::size_t f = 0; f < 5; ++f) {
      CHECK(again.folds[f].positives == plan.folds[f].positives);
      CHECK(again.folds[f].negatives == plan.folds[f].negatives);
    }
    CHECK(make_folds(g, 8).folds[0].positives != plan.folds[0].positives);
  }

  TEST_CASE("training graph and negatives leave the held-out fold out") {
    const auto g = testing_support::erdos_renyi(50, 0.1, 4);
    const auto plan = make_folds(g, 1);
    const auto train = training_graph(g, plan, 2);
    CHECK(train.edge_count() == g.edge_count() - plan.folds[2].positives.size());
    for (auto e : plan.folds[2].positives) CHECK_FALSE(train.has_edge(e.u, e.v));
    CHECK(training_negatives(plan, 2).size() == plan.n_neg - plan.folds[2].negatives.size());
  }

  TEST_CASE("dense graphs enumerate their non-edges") {
    // K6 is complete; its first 7 edges leave 8 non-edges for 7 positives.
    std::vector<NodePair> e;
    for (NodeId u = 0; u < 6; ++u) {
      for (NodeId v = u + 1; v < 6; ++v) e.push_back({u, v});
    }
    const auto complete = SimpleGraph::from_edges(6, e);
    CHECK_THROWS_AS(make_folds(complete, 1), Error);
    e.resize(7);
    const auto sparse = SimpleGraph::from_edges(6, e);
    const auto plan = make_folds(sparse, 1);
    CHECK(plan.n_neg == 7);
    CHECK_THROWS_AS(make_folds(SimpleGraph::from_edges(6, std::span(e).first(3)), 1), PreconditionError);
  }

  TEST_CASE("mean and population std") {
    std::vector<double> v{1, 2, 3, 4};
    const auto [m, s] = mean_std(v);
    CHECK(m == 2.5);
    CHECK(s == doctest::Approx(std::sqrt(1.25)));
  }

  TEST_CASE("benchmark runs every scorer on the same folds") {
    const auto g = testing_support::block_model(2, 40, 0.3, 0.02, 3);
    auto adamic = make_scorer("adamic");
    auto random = make_scorer("random");
    FlakyScorer flaky;
    std::vector<Scorer*> scorers{adamic.get(), random.get(), &flaky};
    BenchmarkOptions opt;
    opt.dataset = "sbm";
    const auto report = run_benchmark(g, nullptr, scorers, opt);
    REQUIRE(report.cells.size() == 3);
    CHECK(report.cells[0].auc.size() == 5);
    CHECK(report.cells[0].mean_auc > 0.7);
    CHECK(report.cells[2].failed);
    CHECK(report.cells[2].error == "fold 1: boom");
    const auto j = to_json(report);
    CHECK(j["results"][2]["failed"] == true);
    CHECK(j["results"][0]["roc_auc"]["folds"].size() == 5);
    const auto table = format_table(report);
    CHECK(table.find("adamic") != std::string::npos);
    CHECK(table.find("±") != std::string::npos);
    CHECK(table.find("failed") != std::string::npos);
  }

  TEST_CASE("benchmark is reproducible") {
    const auto g = testing_support::erdos_renyi(60, 0.1, 2);
    auto a = make_scorer("snore", {{"walks", "64"}});
    std::vector<Scorer*> s{a.get()};
    const auto r1 = run_benchmark(g, nullptr, s, {});
    const auto r2 = run_benchmark(g, nullptr, s, {});
    CHECK(r1.cells[0].auc == r2.cells[0].auc);
    CHECK(r1.cells[0].ap == r2.cells[0].ap);
  }
}
