#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace detail {

template <typename Scalar>
struct LabeledScore {
  Scalar score;
  bool positive;
};

// Pooled scores sorted descending; the order inside a tie group is irrelevant
// to both metrics below.
template <typename Scalar>
std::vector<LabeledScore<Scalar>> pool_descending(std::span<const Scalar> pos, std::span<const Scalar> neg) {
  if (pos.empty() || neg.empty()) throw PreconditionError("metric needs nonempty positive and negative scores");
  std::vector<LabeledScore<Scalar>> all;
  all.reserve(pos.size() + neg.size());
  for (Scalar s : pos) all.push_back({s, true});
  for (Scalar s : neg) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
  return all;
}

}  // namespace detail

// P(pos > neg) + 0.5 P(pos == neg) over all cross pairs, computed from
// tie-averaged ranks.
template <typename Scalar>
double roc_auc(std::span<const Scalar> pos, std::span<const Scalar> neg) {
  const auto all = detail::pool_descending(pos, neg);
  // Walk from the top: each positive beats every negative strictly below it.
  double wins = 0.0;
  std::size_t neg_above = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t p = 0, q = 0;
    for (; j < all.size() && all[j].score == all[i].score; ++j) (all[j].positive ? p : q)++;
    const std::size_t neg_below = neg.size() - neg_above - q;
    wins += static_cast<double>(p) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(q));
    neg_above += q;
    i = j;
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Precision at each positive, averaged over positives. Inside a tie group of
// m items holding p positives the result is the expectation over all orders
// of the group, so tied scores give a well-defined value independent of input
// order.
template <typename Scalar>
double average_precision(std::span<const Scalar> pos, std::span<const Scalar> neg) {
  const auto all = detail::pool_descending(pos, neg);
  double sum = 0.0;
  std::size_t seen = 0, hits = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i, p = 0;
    for (; j < all.size() && all[j].score == all[i].score; ++j) p += all[j].positive;
    const std::size_t m = j - i;
    if (p > 0) {
      // A slot r of the group holds a positive with probability p/m; given
      // that, the expected number of positives at or above it is
      // hits + 1 + (r-1)(p-1)/(m-1).
      const double spread = m > 1 ? static_cast<double>(p - 1) / static_cast<double>(m - 1) : 0.0;
      double group = 0.0;
      for (std::size_t r = 1; r <= m; ++r) {
        group += (static_cast<double>(hits) + 1.0 + static_cast<double>(r - 1) * spread) /
                 static_cast<double>(seen + r);
      }
      sum += group * static_cast<double>(p) / static_cast<double>(m);
    }
    seen += m;
    hits += p;
    i = j;
  }
  return sum / static_cast<double>(pos.size());
}

template <typename Scalar>
double roc_auc(const std::vector<Scalar>& pos, const std::vector<Scalar>& neg) {
  return roc_auc(std::span<const Scalar>(pos), std::span<const Scalar>(neg));
}

template <typename Scalar>
double average_precision(const std::vector<Scalar>& pos, const std::vector<Scalar>& neg) {
  return average_precision(std::span<const Scalar>(pos), std::span<const Scalar>(neg));
}

}  // namespace ontolink
