#include "ontolink/snore.hpp"

#include <algorithm>
#include <cmath>

#include "ontolink/errors.hpp"
#include "ontolink/parallel.hpp"
#include "ontolink/random.hpp"

namespace ontolink {

nlohmann::json to_json(const SnoreParams& p) {
  return {
      {"walks_per_node", p.walks_per_node},
      {"max_len", p.max_len},
      {"threshold", p.threshold},
      {"nnz_cap_per_node", p.nnz_cap_per_node},
      {"seed", p.seed},
      {"hash_buckets", p.hash_buckets},
  };
}

namespace {

void validate(const SnoreParams& p) {
  if (p.walks_per_node < 1) throw PreconditionError("walks_per_node must be positive");
  if (p.max_len < 1) throw PreconditionError("max_len must be positive");
  if (p.nnz_cap_per_node < 1) throw PreconditionError("nnz_cap_per_node must be positive");
  if (!(p.threshold >= 0.0)) throw PreconditionError("threshold must be non-negative");
}

std::uint32_t bucket_of(NodeId node, std::size_t buckets) {
  return buckets == 0 ? node : static_cast<std::uint32_t>(mix_seed(node, 0x5bd1e995) % buckets);
}

// Visits every node of every walk from `start`, the start node included once
// per walk. Each walk length is uniform on 1..max_len.
template <typename Visit>
void sample_walks(const SimpleGraph& g, NodeId start, const SnoreParams& p, Visit&& visit) {
  Rng rng = make_rng(p.seed, start);
  std::uniform_int_distribution<int> length(1, p.max_len);
  for (int w = 0; w < p.walks_per_node; ++w) {
    const int steps = length(rng);
    NodeId at = start;
    visit(at);
    for (int s = 0; s < steps; ++s) {
      const auto nb = g.neighbors(at);
      if (nb.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
      at = nb[pick(rng)];
      visit(at);
    }
  }
}

struct Scratch {
  std::vector<std::uint32_t> counts;
  std::vector<double> acc;
  std::vector<std::uint32_t> touched;
};

// Profile via a dense per-worker counter.
WalkProfile profile_with(const SimpleGraph& g, NodeId start, const SnoreParams& p, Scratch& s) {
  std::uint64_t total = 0;
  sample_walks(g, start, p, [&](NodeId node) {
    const auto b = bucket_of(node, p.hash_buckets);
    if (s.counts[b]++ == 0) s.touched.push_back(b);
    ++total;
  });
  std::sort(s.touched.begin(), s.touched.end());
  WalkProfile out;
  out.index = s.touched;
  out.weight.reserve(s.touched.size());
  for (auto b : s.touched) {
    out.weight.push_back(static_cast<double>(s.counts[b]) / static_cast<double>(total));
    s.counts[b] = 0;
  }
  s.touched.clear();
  return out;
}

}  // namespace

WalkProfile walk_profile(const SimpleGraph& g, NodeId start, const SnoreParams& params) {
  validate(params);
  if (!g.valid(start)) throw PreconditionError("walk start outside the graph");
  Scratch s;
  s.counts.assign(params.hash_buckets ? params.hash_buckets : g.node_count(), 0);
  return profile_with(g, start, params, s);
}

SparseEmbedding snore_fit(const SimpleGraph& g, const SnoreParams& params, std::vector<std::string> feature_names) {
  validate(params);
  const std::size_t n = g.node_count();
  if (n == 0) throw PreconditionError("cannot embed an empty graph");
  if (!feature_names.empty() && feature_names.size() != n) {
    throw PreconditionError("feature_names must name every node");
  }
  const std::size_t buckets = params.hash_buckets ? params.hash_buckets : n;
  const unsigned threads = resolve_threads(params.threads);
  const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n)));

  std::vector<Scratch> scratch(workers);
  for (auto& s : scratch) s.counts.assign(buckets, 0);

  std::vector<WalkProfile> profiles(n);
  parallel_for(0, n, workers, [&](std::size_t u, unsigned w) {
    profiles[u] = profile_with(g, static_cast<NodeId>(u), params, scratch[w]);
  });

  std::vector<double> norms(n);
  for (std::size_t u = 0; u < n; ++u) {
    double sq = 0.0;
    for (double x : profiles[u].weight) sq += x * x;
    norms[u] = std::sqrt(sq);
  }

  // Inverted index bucket -> (node, weight), nodes ascending.
  std::vector<std::size_t> start(buckets + 1, 0);
  for (const auto& p : profiles) {
    for (auto b : p.index) ++start[b + 1];
  }
  for (std::size_t b = 0; b < buckets; ++b) start[b + 1] += start[b];
  std::vector<NodeId> inv_node(start.back());
  std::vector<double> inv_weight(start.back());
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t u = 0; u < n; ++u) {
      const auto& p = profiles[u];
      for (std::size_t k = 0; k < p.index.size(); ++k) {
        const std::size_t at = cursor[p.index[k]]++;
        inv_node[at] = static_cast<NodeId>(u);
        inv_weight[at] = p.weight[k];
      }
    }
  }

  for (auto& s : scratch) {
    s.counts = {};
    s.acc.assign(n, 0.0);
  }

  using Entry = std::pair<int, double>;
  std::vector<std::vector<Entry>> rows(n);
  const auto cap = static_cast<std::size_t>(params.nnz_cap_per_node);
  parallel_for(0, n, workers, [&](std::size_t u, unsigned w) {
    auto& s = scratch[w];
    const auto& p = profiles[u];
    for (std::size_t k = 0; k < p.index.size(); ++k) {
      const double wu = p.weight[k];
      const auto b = p.index[k];
      for (std::size_t at = start[b]; at < start[b + 1]; ++at) {
        const NodeId f = inv_node[at];
        if (s.acc[f] == 0.0) s.touched.push_back(f);
        s.acc[f] += wu * inv_weight[at];
      }
    }
    std::vector<Entry> kept;
    for (auto f : s.touched) {
      const double cosine = std::min(1.0, s.acc[f] / (norms[u] * norms[f]));
      s.acc[f] = 0.0;
      if (cosine >= params.threshold && cosine > 0.0) kept.emplace_back(static_cast<int>(f), cosine);
    }
    s.touched.clear();
    if (kept.size() > cap) {
      auto by_value = [](const Entry& a, const Entry& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      };
      std::nth_element(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(cap), kept.end(), by_value);
      kept.resize(cap);
    }
    std::sort(kept.begin(), kept.end());
    rows[u] = std::move(kept);
  });

  SparseEmbedding out;
  out.params = params;
  out.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXi per_row(static_cast<Eigen::Index>(n));
  for (std::size_t u = 0; u < n; ++u) per_row[static_cast<Eigen::Index>(u)] = static_cast<int>(rows[u].size());
  out.rows.reserve(per_row);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [f, value] : rows[u]) out.rows.insert(static_cast<Eigen::Index>(u), f) = value;
    rows[u] = {};
  }
  out.rows.makeCompressed();

  if (feature_names.empty()) {
    feature_names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) feature_names.push_back(std::to_string(i));
  }
  out.feature_names = std::move(feature_names);
  return out;
}

double snore_score(const SparseEmbedding& embedding, NodeId u, NodeId v) {
  const auto n = static_cast<NodeId>(embedding.node_count());
  if (u >= n || v >= n) throw PreconditionError("node outside the embedding");
  return sparse_row_dot(embedding.rows, static_cast<int>(u), static_cast<int>(v));
}

void SnoreScorer::fit(const FitContext& context) {
  SnoreParams p = params_;
  p.seed = context.seed;
  if (p.threads == 0) p.threads = context.threads;
  embedding_ = snore_fit(context.graph, p);
}

}  // namespace ontolink
