#include "ontolink/session.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace {

void diff_edges(const SimpleGraph& from, const SimpleGraph& to, std::set<NodePair>& added,
                std::set<NodePair>& removed) {
  const auto a = from.edges();
  const auto b = to.edges();
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::inserter(added, added.end()));
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(removed, removed.end()));
}

std::uint64_t non_edge_count(const SimpleGraph& g) {
  const std::uint64_t n = g.node_count();
  return n * (n - (n > 0 ? 1 : 0)) / 2 - g.edge_count();
}

}  // namespace

Session::Session(SimpleGraph snapshot, NodeMap nodes, SparseEmbedding embedding, SessionConfig config)
    : snapshot_(std::move(snapshot)), nodes_(std::move(nodes)), config_(std::move(config)) {
  if (nodes_.size() != snapshot_.node_count() || embedding.node_count() != snapshot_.node_count()) {
    throw PreconditionError("graph, node map and embedding disagree on the node count");
  }

  SimpleGraph working = snapshot_;
  if (config_.journal_path && std::filesystem::exists(*config_.journal_path)) {
    std::ifstream in(*config_.journal_path);
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const bool accepted = j.at("action").get<std::string>() == "accept";
        const NodePair pair{nodes_.id(j.at("u").get<std::string>()), nodes_.id(j.at("v").get<std::string>())};
        const std::span<const NodePair> one(&pair, 1);
        auto r = apply_feedback(working, accepted ? one : std::span<const NodePair>{},
                                accepted ? std::span<const NodePair>{} : one, j.at("timestamp").get<std::string>());
        if (!r.errors.empty()) throw Error(r.errors.front().reason);
        working = std::move(r.graph);
        journal_.insert(journal_.end(), r.applied.begin(), r.applied.end());
      } catch (const std::exception& e) {
        throw Error("journal line " + std::to_string(number) + " does not replay: " + e.what());
      }
    }
  }

  auto initial = embed_state(snapshot_, std::make_shared<const SparseEmbedding>(std::move(embedding)), 0);
  initial->graph = std::move(working);
  diff_edges(*initial->embedded_graph, initial->graph, initial->added, initial->removed);
  state_ = std::move(initial);
}

Session::~Session() {
  if (reembed_thread_.joinable()) reembed_thread_.join();
}

std::shared_ptr<const SessionState> Session::state() const {
  std::lock_guard lock(state_mutex_);
  return state_;
}

void Session::publish(std::shared_ptr<const SessionState> next) {
  std::lock_guard lock(state_mutex_);
  state_ = std::move(next);
}

std::shared_ptr<SessionState> Session::embed_state(SimpleGraph graph, std::shared_ptr<const SparseEmbedding> embedding,
                                                   std::uint64_t revision) const {
  auto st = std::make_shared<SessionState>();
  CandidateOptions options;
  options.k = config_.cache_floor;
  options.threads = config_.threads;
  options.only = CandidateKind::Missing;
  st->missing_cache =
      std::make_shared<const std::vector<ScoredCandidate>>(ontolink::candidates(*embedding, graph, options).missing);
  st->available_at_embed = non_edge_count(graph);
  st->embedded_graph = std::make_shared<const SimpleGraph>(graph);
  st->graph = std::move(graph);
  st->embedding = std::move(embedding);
  st->revision = revision;
  return st;
}

CandidateLists Session::candidates(CandidateKind kind, std::size_t k,
                                   const std::optional<std::vector<NodeId>>& subset) const {
  const auto st = state();
  CandidateOptions options;
  options.k = k;
  options.subset = subset;
  options.threads = config_.threads;
  options.only = kind;

  const auto& cache = *st->missing_cache;
  if (kind == CandidateKind::Missing && !subset) {
    // The cache is a prefix of the ranking on the embedded graph. Drop pairs
    // accepted since, add pairs rejected since; the result is exact while
    // enough cached pairs survive.
    std::vector<ScoredCandidate> merged;
    merged.reserve(cache.size() + st->removed.size());
    for (const auto& c : cache) {
      if (!st->added.count({c.u, c.v})) merged.push_back(c);
    }
    const bool complete = cache.size() >= st->available_at_embed;
    if (complete || merged.size() >= k) {
      for (const auto& p : st->removed) {
        merged.push_back({p.u, p.v, sparse_row_dot<double, Eigen::RowMajor, int>(st->embedding->rows,
                                                                                 static_cast<int>(p.u),
                                                                                 static_cast<int>(p.v)),
                          CandidateKind::Missing});
      }
      std::sort(merged.begin(), merged.end(), ranks_before);
      CandidateLists out;
      const std::size_t available = merged.size() >= k ? k : merged.size();
      if (available < k) {
        out.warnings.push_back("k=" + std::to_string(k) + " exceeds the " + std::to_string(available) +
                               " available missing pairs; clamped");
      }
      merged.resize(available);
      out.missing = std::move(merged);
      return out;
    }
  }
  return ontolink::candidates(*st->embedding, st->graph, options);
}

FeedbackOutcome Session::feedback(std::span<const NodePair> accept, std::span<const NodePair> reject) {
  std::lock_guard write(write_mutex_);
  if (reembedding_.load()) throw SessionBusy();
  const auto st = state();
  auto result = apply_feedback(st->graph, accept, reject);

  auto next = std::make_shared<SessionState>(*st);
  next->graph = std::move(result.graph);
  for (const auto& entry : result.applied) {
    auto& undo = entry.accepted ? next->removed : next->added;
    auto& track = entry.accepted ? next->added : next->removed;
    if (!undo.erase(entry.edge)) track.insert(entry.edge);
  }
  if (!result.applied.empty()) {
    next->revision = st->revision + 1;
    append_journal(result.applied);
    publish(next);
  }
  return {std::move(result.applied), std::move(result.errors), next->revision};
}

bool Session::start_reembed() {
  std::lock_guard write(write_mutex_);
  if (reembedding_.load()) return false;
  reembedding_.store(true);
  if (reembed_thread_.joinable()) reembed_thread_.join();
  {
    std::lock_guard lock(reembed_mutex_);
    reembed_error_.reset();
  }
  const auto st = state();
  reembed_thread_ = std::thread([this, st] {
    try {
      SnoreParams params = st->embedding->params;
      params.threads = config_.threads;
      auto fitted = std::make_shared<const SparseEmbedding>(snore_fit(st->graph, params, nodes_.names()));
      publish(embed_state(st->graph, std::move(fitted), st->revision + 1));
    } catch (const std::exception& e) {
      std::lock_guard lock(reembed_mutex_);
      reembed_error_ = e.what();
    }
    reembedding_.store(false);
  });
  return true;
}

void Session::wait_for_reembed() {
  std::lock_guard write(write_mutex_);
  if (reembed_thread_.joinable()) reembed_thread_.join();
}

std::optional<std::string> Session::last_reembed_error() const {
  std::lock_guard lock(reembed_mutex_);
  return reembed_error_;
}

std::shared_ptr<const GlobalExplanation> Session::global_explanation() const {
  const auto st = state();
  std::lock_guard lock(global_mutex_);
  if (global_for_ != st->embedding) {
    GlobalOptions options = config_.global;
    options.seed = config_.seed;
    global_ = std::make_shared<const GlobalExplanation>(explain_global(*st->embedding, *st->embedded_graph, options));
    global_for_ = st->embedding;
  }
  return global_;
}

std::vector<JournalEntry> Session::journal() const {
  std::lock_guard lock(journal_mutex_);
  return journal_;
}

nlohmann::json Session::journal_json(const JournalEntry& entry) const {
  return {{"timestamp", entry.timestamp},
          {"action", entry.accepted ? "accept" : "reject"},
          {"u", nodes_.name(entry.edge.u)},
          {"v", nodes_.name(entry.edge.v)}};
}

void Session::append_journal(const std::vector<JournalEntry>& entries) {
  if (config_.journal_path) {
    std::ofstream out(*config_.journal_path, std::ios::app);
    if (!out) throw Error("cannot append to journal " + config_.journal_path->string());
    for (const auto& e : entries) out << journal_json(e).dump() << '\n';
    out.flush();
    if (!out) throw Error("failed writing journal " + config_.journal_path->string());
  }
  std::lock_guard lock(journal_mutex_);
  journal_.insert(journal_.end(), entries.begin(), entries.end());
}

}  // namespace ontolink
