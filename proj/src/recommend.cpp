#include "ontolink/recommend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <queue>
#include <unordered_set>

#include "ontolink/errors.hpp"
#include "ontolink/parallel.hpp"

namespace ontolink {

std::string_view to_string(CandidateKind kind) { return kind == CandidateKind::Missing ? "missing" : "redundant"; }

CandidateKind parse_candidate_kind(std::string_view text) {
  if (text == "missing") return CandidateKind::Missing;
  if (text == "redundant") return CandidateKind::Redundant;
  throw Error("unknown candidate kind: " + std::string(text));
}

bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.score != b.score) return a.kind == CandidateKind::Missing ? a.score > b.score : a.score < b.score;
  return std::tie(a.u, a.v) < std::tie(b.u, b.v);
}

namespace {

// Bounded selection of the k best candidates; the heap top is the worst kept.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void offer(const ScoredCandidate& c) {
    if (k_ == 0) return;
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    } else if (ranks_before(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    }
  }

  void merge(const TopK& other) {
    for (const auto& c : other.heap_) offer(c);
  }

  std::vector<ScoredCandidate> sorted() const {
    auto out = heap_;
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
  }

  std::size_t size() const { return heap_.size(); }

 private:
  std::size_t k_;
  std::vector<ScoredCandidate> heap_;
};

// Which pairs a run ranks: rows P (all nodes in full mode) and, for each row
// p, the partners v that make {p, v} a pair counted exactly once.
class PairSpace {
 public:
  PairSpace(const SimpleGraph& g, const CandidateOptions& options) : g_(g), eligible_(options.eligible) {
    const std::size_t n = g.node_count();
    if (eligible_ && eligible_->size() != n) throw PreconditionError("eligibility mask size differs from node count");
    if (options.subset) {
      in_subset_.assign(n, false);
      for (NodeId p : *options.subset) {
        if (!g.valid(p)) throw PreconditionError("unknown node id " + std::to_string(p));
        in_subset_[p] = true;
      }
      for (NodeId p = 0; p < n; ++p) {
        if (in_subset_[p]) rows_.push_back(p);
      }
    } else {
      rows_.resize(n);
      for (NodeId p = 0; p < n; ++p) rows_[p] = p;
    }
  }

  bool subset_mode() const { return !in_subset_.empty(); }
  const std::vector<NodeId>& rows() const { return rows_; }
  bool eligible(NodeId v) const { return !eligible_ || (*eligible_)[v]; }

  bool partner(NodeId p, NodeId v) const {
    if (v == p || !eligible(v)) return false;
    if (subset_mode() && !in_subset_[v]) return true;
    return v > p;
  }

  // (pairs available as missing candidates, pairs available as redundant)
  std::pair<std::uint64_t, std::uint64_t> capacity() const {
    const std::size_t n = g_.node_count();
    // suffix[v] = eligible partners w >= v that obey the "w > p" rule
    std::vector<std::uint64_t> suffix(n + 1, 0);
    std::uint64_t outside = 0;
    for (std::size_t v = n; v-- > 0;) {
      const bool ordered = eligible(static_cast<NodeId>(v)) && (!subset_mode() || in_subset_[v]);
      suffix[v] = suffix[v + 1] + (ordered ? 1 : 0);
      if (subset_mode() && !in_subset_[v] && eligible(static_cast<NodeId>(v))) ++outside;
    }
    std::uint64_t missing = 0, redundant = 0;
    for (NodeId p : rows_) {
      if (!eligible(p)) continue;
      std::uint64_t partners = suffix[p + 1] + outside;
      std::uint64_t edges = 0;
      for (NodeId v : g_.neighbors(p)) edges += partner(p, v);
      missing += partners - edges;
      redundant += edges;
    }
    return {missing, redundant};
  }

 private:
  const SimpleGraph& g_;
  const std::vector<bool>* eligible_;
  std::vector<bool> in_subset_;
  std::vector<NodeId> rows_;
};

std::size_t clamp_k(std::size_t k, std::uint64_t available, CandidateKind kind, std::vector<std::string>& warnings) {
  if (k <= available) return k;
  warnings.push_back("k=" + std::to_string(k) + " exceeds the " + std::to_string(available) + " available " +
                     std::string(to_string(kind)) + " pairs; clamped");
  return static_cast<std::size_t>(available);
}

struct WorkerState {
  TopK missing;
  TopK redundant;
  std::vector<double> acc;
  std::vector<NodeId> touched;
};

ScoredCandidate make_candidate(NodeId a, NodeId b, double score, CandidateKind kind) {
  const auto pair = NodePair::canonical(a, b);
  return {pair.u, pair.v, score, kind};
}

}  // namespace

CandidateLists candidates(const SparseEmbedding& embedding, const SimpleGraph& g, const CandidateOptions& options) {
  if (embedding.node_count() != g.node_count()) {
    throw PreconditionError("embedding has " + std::to_string(embedding.node_count()) + " rows but graph has " +
                            std::to_string(g.node_count()) + " nodes");
  }
  CandidateLists out;
  const PairSpace space(g, options);
  const auto [available_missing, available_redundant] = space.capacity();
  const std::size_t k_missing = options.only == CandidateKind::Redundant
                                    ? 0
                                    : clamp_k(options.k, available_missing, CandidateKind::Missing, out.warnings);
  const std::size_t k_redundant = options.only == CandidateKind::Missing
                                      ? 0
                                      : clamp_k(options.k, available_redundant, CandidateKind::Redundant, out.warnings);
  if (k_missing == 0 && k_redundant == 0) return out;

  const SparseRows& R = embedding.rows;
  using Columns = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  const Columns columns = R;
  const std::size_t n = g.node_count();
  const unsigned workers = resolve_threads(options.threads);
  std::vector<WorkerState> state;
  for (unsigned w = 0; w < workers; ++w) state.push_back({TopK(k_missing), TopK(k_redundant), {}, {}});

  const auto& rows = space.rows();
  const std::size_t block = std::max<std::size_t>(1, options.block_rows);
  for (std::size_t start = 0; start < rows.size(); start += block) {
    const std::size_t stop = std::min(rows.size(), start + block);
    parallel_for(start, stop, workers, [&](std::size_t i, unsigned worker) {
      const NodeId p = rows[i];
      if (!space.eligible(p)) return;
      WorkerState& ws = state[worker];
      if (ws.acc.empty()) ws.acc.assign(n, 0.0);
      // L[p, .] in ascending feature order, which reproduces sparse_row_dot bit for bit.
      for (SparseRows::InnerIterator it(R, p); k_missing > 0 && it; ++it) {
        const double a = it.value();
        for (Columns::InnerIterator col(columns, it.index()); col; ++col) {
          const auto w = static_cast<NodeId>(col.index());
          if (ws.acc[w] == 0.0) ws.touched.push_back(w);
          ws.acc[w] += a * col.value();
        }
      }
      for (NodeId w : ws.touched) {
        const double s = ws.acc[w];
        ws.acc[w] = 0.0;
        if (s > 0.0 && space.partner(p, w) && !g.has_edge(p, w)) {
          ws.missing.offer(make_candidate(p, w, s, CandidateKind::Missing));
        }
      }
      ws.touched.clear();
      for (NodeId v : g.neighbors(p)) {
        if (k_redundant > 0 && space.partner(p, v)) {
          ws.redundant.offer(make_candidate(p, v, sparse_row_dot<double, Eigen::RowMajor, int>(R, p, v),
                                            CandidateKind::Redundant));
        }
      }
    }, 8);
  }

  TopK missing(k_missing), redundant(k_redundant);
  for (const auto& ws : state) {
    missing.merge(ws.missing);
    redundant.merge(ws.redundant);
  }
  out.missing = missing.sorted();
  out.redundant = redundant.sorted();

  // Too few positive scores: pad with zero-score non-edges in (u, v) order.
  if (out.missing.size() < k_missing) {
    std::unordered_set<NodePair, NodePairHash> positive;
    for (const auto& c : out.missing) positive.insert({c.u, c.v});
    const std::size_t need = k_missing - out.missing.size();
    std::vector<NodePair> zeros;
    for (NodeId p : rows) {
      if (!space.subset_mode() && zeros.size() >= need) break;  // full-mode rows arrive in pair order
      if (!space.eligible(p)) continue;
      std::size_t taken = 0;
      for (NodeId v = 0; v < n && taken < need; ++v) {
        if (!space.partner(p, v) || g.has_edge(p, v)) continue;
        const auto pair = NodePair::canonical(p, v);
        if (positive.count(pair)) continue;
        zeros.push_back(pair);
        ++taken;
      }
    }
    std::sort(zeros.begin(), zeros.end());
    zeros.resize(std::min(zeros.size(), need));
    for (const auto& z : zeros) out.missing.push_back({z.u, z.v, 0.0, CandidateKind::Missing});
  }
  return out;
}

CandidateLists candidates(const Scorer& scorer, const SimpleGraph& g, const CandidateOptions& options) {
  CandidateLists out;
  const PairSpace space(g, options);
  const auto [available_missing, available_redundant] = space.capacity();
  const std::size_t k_missing = options.only == CandidateKind::Redundant
                                    ? 0
                                    : clamp_k(options.k, available_missing, CandidateKind::Missing, out.warnings);
  const std::size_t k_redundant = options.only == CandidateKind::Missing
                                      ? 0
                                      : clamp_k(options.k, available_redundant, CandidateKind::Redundant, out.warnings);
  if (k_missing == 0 && k_redundant == 0) return out;

  const unsigned workers = resolve_threads(options.threads);
  std::vector<WorkerState> state;
  for (unsigned w = 0; w < workers; ++w) state.push_back({TopK(k_missing), TopK(k_redundant), {}, {}});
  const auto& rows = space.rows();
  const std::size_t n = g.node_count();
  parallel_for(0, rows.size(), workers, [&](std::size_t i, unsigned worker) {
    const NodeId p = rows[i];
    if (!space.eligible(p)) return;
    WorkerState& ws = state[worker];
    for (NodeId v = 0; v < n; ++v) {
      if (!space.partner(p, v)) continue;
      const bool edge = g.has_edge(p, v);
      const auto c = make_candidate(p, v, scorer.score(p, v), edge ? CandidateKind::Redundant : CandidateKind::Missing);
      (edge ? ws.redundant : ws.missing).offer(c);
    }
  }, 4);

  TopK missing(k_missing), redundant(k_redundant);
  for (const auto& ws : state) {
    missing.merge(ws.missing);
    redundant.merge(ws.redundant);
  }
  out.missing = missing.sorted();
  out.redundant = redundant.sorted();
  return out;
}

TemporalReport temporal_eval(const CollapsedGraph& t, const CollapsedGraph& t1, std::span<const std::size_t> ks,
                             const SnoreParams& params) {
  const auto embedding = snore_fit(t.graph, params, t.nodes.names());
  return temporal_eval(t, embedding, t1, ks, params.threads);
}

TemporalReport temporal_eval(const CollapsedGraph& t, const SparseEmbedding& embedding_t, const CollapsedGraph& t1,
                             std::span<const std::size_t> ks, unsigned threads) {
  TemporalReport report;
  const std::size_t n = t.graph.node_count();
  std::vector<bool> shared(n, false);
  std::vector<NodeId> to_t1(n, 0);
  for (NodeId u = 0; u < n; ++u) {
    if (auto id = t1.nodes.find(t.nodes.name(u))) {
      shared[u] = true;
      to_t1[u] = *id;
      ++report.shared_nodes;
    }
  }
  if (report.shared_nodes == 0) throw Error("the two versions share no node names");

  const std::size_t k_max = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  CandidateOptions options;
  options.k = k_max;
  options.threads = threads;
  options.eligible = &shared;
  auto lists = candidates(embedding_t, t.graph, options);
  report.warnings = std::move(lists.warnings);

  auto next_has = [&](const ScoredCandidate& c) { return t1.graph.has_edge(to_t1[c.u], to_t1[c.v]); };
  for (CandidateKind kind : {CandidateKind::Missing, CandidateKind::Redundant}) {
    const auto& list = kind == CandidateKind::Missing ? lists.missing : lists.redundant;
    for (std::size_t k : ks) {
      TemporalResult r{kind, k, 0, std::min(k, list.size()), 0.0};
      for (std::size_t i = 0; i < r.total; ++i) {
        const bool present = next_has(list[i]);
        r.hits += kind == CandidateKind::Missing ? present : !present;
      }
      r.accuracy = r.total ? static_cast<double>(r.hits) / static_cast<double>(r.total) : 0.0;
      report.results.push_back(r);
    }
  }
  report.missing = std::move(lists.missing);
  report.redundant = std::move(lists.redundant);
  return report;
}

nlohmann::json to_json(const TemporalReport& report, std::string_view t_label, std::string_view t1_label) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : report.results) {
    results.push_back({{"kind", to_string(r.kind)},
                       {"k", r.k},
                       {"hits", r.hits},
                       {"total", r.total},
                       {"accuracy", r.accuracy},
                       {"year_pair", {t_label, t1_label}}});
  }
  return {{"t", t_label},
          {"t1", t1_label},
          {"shared_nodes", report.shared_nodes},
          {"warnings", report.warnings},
          {"results", std::move(results)}};
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t secs = system_clock::to_time_t(now);
  const auto millis = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const std::size_t len = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + len, sizeof buf - len, ".%03dZ", static_cast<int>(millis));
  return buf;
}

FeedbackResult apply_feedback(const SimpleGraph& g, std::span<const NodePair> accept, std::span<const NodePair> reject,
                              const std::string& timestamp) {
  FeedbackResult result;
  std::unordered_set<NodePair, NodePairHash> batch;
  std::vector<NodePair> add, remove;

  auto check = [&](NodePair raw, bool accepted) {
    auto fail = [&](std::string reason) { result.errors.push_back({raw, accepted, std::move(reason)}); };
    if (!g.valid(raw.u) || !g.valid(raw.v)) return fail("unknown node");
    if (raw.u == raw.v) return fail("self-loop");
    const auto pair = NodePair::canonical(raw.u, raw.v);
    if (accepted && g.has_edge(pair.u, pair.v)) return fail("already an edge");
    if (!accepted && !g.has_edge(pair.u, pair.v)) return fail("not an edge");
    if (!batch.insert(pair).second) return fail("listed twice in this batch");
    (accepted ? add : remove).push_back(pair);
    result.applied.push_back({timestamp, accepted, pair});
  };
  for (const auto& p : accept) check(p, true);
  for (const auto& p : reject) check(p, false);

  result.graph = g.with_changes(add, remove);
  return result;
}

}  // namespace ontolink
