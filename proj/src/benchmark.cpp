#include "ontolink/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ontolink/metrics.hpp"
#include "ontolink/parallel.hpp"

namespace ontolink {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> score_pairs(const Scorer& scorer, std::span<const NodePair> pairs, unsigned threads) {
  std::vector<double> out(pairs.size());
  parallel_for(0, pairs.size(), threads, [&](std::size_t i, unsigned) { out[i] = scorer.score(pairs[i].u, pairs[i].v); },
               256);
  return out;
}

std::string percent(double mean, double std) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean * 100.0, std * 100.0);
  return buf;
}

}  // namespace

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

BenchmarkReport run_benchmark(const SimpleGraph& g, const HeteroGraph* hetero, std::span<Scorer* const> scorers,
                              const BenchmarkOptions& options) {
  return run_benchmark(g, hetero, make_folds(g, options.seed, options.folds), scorers, options);
}

BenchmarkReport run_benchmark(const SimpleGraph& g, const HeteroGraph* hetero, const FoldPlan& plan,
                              std::span<Scorer* const> scorers, const BenchmarkOptions& options) {
  BenchmarkReport report;
  report.dataset = options.dataset;
  report.seed = plan.seed;
  report.nodes = g.node_count();
  report.edges = g.edge_count();
  report.folds = plan.folds.size();
  for (Scorer* s : scorers) {
    BenchmarkCell cell;
    cell.scorer = s->name();
    report.cells.push_back(std::move(cell));
  }

  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    const SimpleGraph train = training_graph(g, plan, f);
    HeteroGraph train_hetero;
    if (hetero) train_hetero = filter_edges(*hetero, train);
    const auto negatives = training_negatives(plan, f);
    const Fold& fold = plan.folds[f];

    for (std::size_t c = 0; c < scorers.size(); ++c) {
      BenchmarkCell& cell = report.cells[c];
      if (cell.failed) continue;
      Scorer& scorer = *scorers[c];
      try {
        FitContext context{train, hetero ? &train_hetero : nullptr, options.seed, options.threads};
        if (scorer.wants_negatives()) context.training_negatives = negatives;
        auto start = Clock::now();
        scorer.fit(context);
        cell.fit_seconds += seconds_since(start);

        start = Clock::now();
        const auto pos = score_pairs(scorer, fold.positives, options.threads);
        const auto neg = score_pairs(scorer, fold.negatives, options.threads);
        cell.score_seconds += seconds_since(start);
        cell.auc.push_back(roc_auc(pos, neg));
        cell.ap.push_back(average_precision(pos, neg));
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = "fold " + std::to_string(f) + ": " + e.what();
      }
    }
  }

  for (auto& cell : report.cells) {
    if (cell.failed) continue;
    std::tie(cell.mean_auc, cell.std_auc) = mean_std(cell.auc);
    std::tie(cell.mean_ap, cell.std_ap) = mean_std(cell.ap);
  }
  return report;
}

nlohmann::json to_json(const BenchmarkReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json j = {{"scorer", c.scorer}, {"failed", c.failed}};
    if (c.failed) {
      j["error"] = c.error;
    } else {
      j["roc_auc"] = {{"mean", c.mean_auc}, {"std", c.std_auc}, {"folds", c.auc}};
      j["average_precision"] = {{"mean", c.mean_ap}, {"std", c.std_ap}, {"folds", c.ap}};
      j["fit_seconds"] = c.fit_seconds;
      j["score_seconds"] = c.score_seconds;
    }
    cells.push_back(std::move(j));
  }
  return {{"dataset", report.dataset}, {"seed", report.seed},   {"nodes", report.nodes},
          {"edges", report.edges},     {"folds", report.folds}, {"results", std::move(cells)}};
}

std::string format_table(const BenchmarkReport& report) {
  std::size_t width = 6;
  for (const auto& c : report.cells) width = std::max(width, c.scorer.size());
  std::ostringstream out;
  auto row = [&](const std::string& name, const std::string& auc, const std::string& ap, const std::string& fit) {
    out << name << std::string(width - name.size() + 2, ' ');
    // "±" is two bytes but one column; pad on visible width.
    auto pad = [](const std::string& s, std::size_t w) {
      const std::size_t visible = s.size() - (s.find("±") != std::string::npos ? 1 : 0);
      return s + std::string(w > visible ? w - visible : 0, ' ');
    };
    out << pad(auc, 16) << pad(ap, 16) << fit << '\n';
  };
  out << report.dataset << ": " << report.nodes << " nodes, " << report.edges << " edges, seed " << report.seed
      << '\n';
  row("scorer", "ROC-AUC", "AP", "fit s");
  for (const auto& c : report.cells) {
    if (c.failed) {
      row(c.scorer, "failed", "failed", c.error);
      continue;
    }
    char fit[32];
    std::snprintf(fit, sizeof fit, "%.2f", c.fit_seconds);
    row(c.scorer, percent(c.mean_auc, c.std_auc), percent(c.mean_ap, c.std_ap), fit);
  }
  return out.str();
}

}  // namespace ontolink
