#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ontolink/folds.hpp"
#include "ontolink/graph.hpp"
#include "ontolink/graphcore.hpp"

namespace ontolink {

struct BenchmarkCell {
  std::string scorer;
  std::vector<double> auc;  // one entry per fold
  std::vector<double> ap;
  double mean_auc = 0, std_auc = 0;
  double mean_ap = 0, std_ap = 0;
  double fit_seconds = 0;    // summed over folds
  double score_seconds = 0;
  bool failed = false;
  std::string error;
};

struct BenchmarkReport {
  std::string dataset;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t folds = 0;
  std::vector<BenchmarkCell> cells;
};

struct BenchmarkOptions {
  std::string dataset = "graph";
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::size_t folds = 5;
};

// Population mean and standard deviation.
std::pair<double, double> mean_std(std::span<const double> values);

// Every scorer sees the same folds. A scorer that throws is recorded as a
// failed cell and the run moves on. `hetero`, when given, must share node
// ids with `g` and is restricted to each fold's training edges.
BenchmarkReport run_benchmark(const SimpleGraph& g, const HeteroGraph* hetero, std::span<Scorer* const> scorers,
                              const BenchmarkOptions& options);

BenchmarkReport run_benchmark(const SimpleGraph& g, const HeteroGraph* hetero, const FoldPlan& plan,
                              std::span<Scorer* const> scorers, const BenchmarkOptions& options);

nlohmann::json to_json(const BenchmarkReport& report);

// Aligned table of mean ± std, scaled by 100.
std::string format_table(const BenchmarkReport& report);

}  // namespace ontolink
