#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ontolink/graph.hpp"
#include "ontolink/graphcore.hpp"
#include "ontolink/snore.hpp"

namespace ontolink {

enum class CandidateKind { Missing, Redundant };

std::string_view to_string(CandidateKind kind);
CandidateKind parse_candidate_kind(std::string_view text);

struct ScoredCandidate {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  double score = 0;
  CandidateKind kind = CandidateKind::Missing;

  bool operator==(const ScoredCandidate&) const = default;
};

// Missing candidates come first by (-score, u, v); redundant ones by (score, u, v).
bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b);

struct CandidateOptions {
  std::size_t k = 100;
  // Rows P of L[P] = R[P] R^T; every pair touching P is considered once.
  std::optional<std::vector<NodeId>> subset;
  std::size_t block_rows = 1024;
  unsigned threads = 0;
  // When set, only pairs with both endpoints eligible are ranked.
  const std::vector<bool>* eligible = nullptr;
  // Restricts the run to one list; the other comes back empty.
  std::optional<CandidateKind> only;
};

struct CandidateLists {
  std::vector<ScoredCandidate> missing;
  std::vector<ScoredCandidate> redundant;
  std::vector<std::string> warnings;  // k clamping
};

// Top-k non-edges and bottom-k edges of L = R R^T. Rows are streamed in blocks
// and non-edges scoring exactly 0 fill the tail in (u, v) order.
CandidateLists candidates(const SparseEmbedding& embedding, const SimpleGraph& g, const CandidateOptions& options);

// Same ranking for any fitted scorer, evaluated pair by pair.
CandidateLists candidates(const Scorer& scorer, const SimpleGraph& g, const CandidateOptions& options);

// Version pair comparison. Candidates are drawn on version t among nodes that
// also exist (by name) in version t+1.
struct TemporalResult {
  CandidateKind kind = CandidateKind::Missing;
  std::size_t k = 0;
  std::size_t hits = 0;
  std::size_t total = 0;
  double accuracy = 0;
};

struct TemporalReport {
  std::vector<TemporalResult> results;  // per kind, per k in input order
  std::vector<ScoredCandidate> missing;   // longest lists, ids of version t
  std::vector<ScoredCandidate> redundant;
  std::size_t shared_nodes = 0;
  std::vector<std::string> warnings;
};

TemporalReport temporal_eval(const CollapsedGraph& t, const CollapsedGraph& t1, std::span<const std::size_t> ks,
                             const SnoreParams& params);

// Scores candidates from an already fitted embedding of version t.
TemporalReport temporal_eval(const CollapsedGraph& t, const SparseEmbedding& embedding_t, const CollapsedGraph& t1,
                             std::span<const std::size_t> ks, unsigned threads = 0);

nlohmann::json to_json(const TemporalReport& report, std::string_view t_label, std::string_view t1_label);

struct JournalEntry {
  std::string timestamp;  // ISO-8601 UTC
  bool accepted = true;   // false for a rejection
  NodePair edge;
};

struct FeedbackError {
  NodePair edge;
  bool accepted = true;
  std::string reason;
};

struct FeedbackResult {
  SimpleGraph graph;
  std::vector<JournalEntry> applied;
  std::vector<FeedbackError> errors;
};

std::string utc_timestamp();

// Accepted pairs must be current non-edges, rejected pairs current edges.
// Offending pairs are reported; the rest are applied together.
FeedbackResult apply_feedback(const SimpleGraph& g, std::span<const NodePair> accept, std::span<const NodePair> reject,
                              const std::string& timestamp = utc_timestamp());

}  // namespace ontolink
