#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ontolink/explain.hpp"
#include "ontolink/graph.hpp"
#include "ontolink/recommend.hpp"
#include "ontolink/snore.hpp"

namespace ontolink {

struct SessionConfig {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::size_t cache_floor = 1000;  // missing candidates kept precomputed
  std::optional<std::filesystem::path> journal_path;
  GlobalOptions global;
};

// One immutable view of the working state. Readers hold a shared_ptr to it;
// writers build a new one and swap it in.
struct SessionState {
  SimpleGraph graph;                                  // working graph
  std::shared_ptr<const SparseEmbedding> embedding;
  std::shared_ptr<const SimpleGraph> embedded_graph;  // what the embedding was fitted on
  std::set<NodePair> added;    // edges of `graph` missing from `embedded_graph`
  std::set<NodePair> removed;  // edges of `embedded_graph` missing from `graph`
  // Top missing candidates of `embedded_graph`, a prefix of the full ranking.
  std::shared_ptr<const std::vector<ScoredCandidate>> missing_cache;
  std::size_t available_at_embed = 0;  // non-edges of `embedded_graph`
  std::uint64_t revision = 0;

  bool stale() const { return !added.empty() || !removed.empty(); }
};

struct FeedbackOutcome {
  std::vector<JournalEntry> applied;
  std::vector<FeedbackError> errors;
  std::uint64_t revision = 0;
};

class SessionBusy : public Error {
 public:
  SessionBusy() : Error("re-embedding in progress") {}
};

// Curator session: working graph, embedding and feedback journal. Reads are
// lock-free snapshots; feedback and re-embedding are serialized.
class Session {
 public:
  // Replays an existing journal at `config.journal_path` onto `snapshot`.
  Session(SimpleGraph snapshot, NodeMap nodes, SparseEmbedding embedding, SessionConfig config = {});
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  std::shared_ptr<const SessionState> state() const;
  const NodeMap& nodes() const { return nodes_; }
  const SimpleGraph& snapshot() const { return snapshot_; }
  const SessionConfig& config() const { return config_; }

  CandidateLists candidates(CandidateKind kind, std::size_t k, const std::optional<std::vector<NodeId>>& subset) const;

  // Throws SessionBusy while a re-embed runs.
  FeedbackOutcome feedback(std::span<const NodePair> accept, std::span<const NodePair> reject);

  // Starts a background refit on the working graph; false if one is running.
  bool start_reembed();
  bool reembedding() const { return reembedding_.load(); }
  void wait_for_reembed();
  std::optional<std::string> last_reembed_error() const;

  // Global fit for the current embedding, computed once per embedding.
  std::shared_ptr<const GlobalExplanation> global_explanation() const;

  std::vector<JournalEntry> journal() const;

  nlohmann::json journal_json(const JournalEntry& entry) const;

 private:
  void publish(std::shared_ptr<const SessionState> next);
  std::shared_ptr<SessionState> embed_state(SimpleGraph graph, std::shared_ptr<const SparseEmbedding> embedding,
                                            std::uint64_t revision) const;
  void append_journal(const std::vector<JournalEntry>& entries);

  SimpleGraph snapshot_;
  NodeMap nodes_;
  SessionConfig config_;

  mutable std::mutex state_mutex_;
  std::shared_ptr<const SessionState> state_;

  std::mutex write_mutex_;
  std::vector<JournalEntry> journal_;
  mutable std::mutex journal_mutex_;

  std::atomic<bool> reembedding_{false};
  std::thread reembed_thread_;
  mutable std::mutex reembed_mutex_;
  std::optional<std::string> reembed_error_;

  mutable std::mutex global_mutex_;
  mutable std::shared_ptr<const SparseEmbedding> global_for_;
  mutable std::shared_ptr<const GlobalExplanation> global_;
};

}  // namespace ontolink
