#include "ontolink/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ontolink/errors.hpp"
#include "ontolink/folds.hpp"

namespace ontolink {

namespace {

void add_product_row(const SparseRows& R, NodeId u, NodeId v, Eigen::Index row,
                     std::vector<Eigen::Triplet<double, int>>& out) {
  SparseRows::InnerIterator i(R, u), j(R, v);
  while (i && j) {
    if (i.index() < j.index()) {
      ++i;
    } else if (j.index() < i.index()) {
      ++j;
    } else {
      out.emplace_back(static_cast<int>(row), static_cast<int>(i.index()), i.value() * j.value());
      ++i;
      ++j;
    }
  }
}

void sort_contributions(std::vector<Contribution>& c) {
  std::sort(c.begin(), c.end(), [](const Contribution& a, const Contribution& b) {
    return a.value != b.value ? a.value > b.value : a.feature < b.feature;
  });
}

}  // namespace

GlobalExplanation explain_global(const SparseEmbedding& embedding, const SimpleGraph& g,
                                 const GlobalOptions& options) {
  if (embedding.node_count() != g.node_count()) throw PreconditionError("embedding and graph sizes differ");
  const FoldPlan plan = make_folds(g, options.seed);
  const Fold& fold = plan.folds.front();
  const auto rows = static_cast<Eigen::Index>(fold.positives.size() + fold.negatives.size());

  std::vector<Eigen::Triplet<double, int>> triplets;
  Eigen::VectorXd y(rows);
  Eigen::Index r = 0;
  for (const auto& e : fold.positives) {
    add_product_row(embedding.rows, e.u, e.v, r, triplets);
    y[r++] = 1.0;
  }
  for (const auto& e : fold.negatives) {
    add_product_row(embedding.rows, e.u, e.v, r, triplets);
    y[r++] = 0.0;
  }
  DesignMatrix X(rows, embedding.rows.cols());
  X.setFromTriplets(triplets.begin(), triplets.end());

  std::vector<std::uint32_t> ids(static_cast<std::size_t>(X.cols()));
  std::iota(ids.begin(), ids.end(), 0u);
  return explain_global(X, y, ids, options);
}

GlobalExplanation explain_global(const DesignMatrix& X, const Eigen::VectorXd& y,
                                 const std::vector<std::uint32_t>& feature_ids, const GlobalOptions& options) {
  if (static_cast<std::size_t>(X.cols()) != feature_ids.size()) throw PreconditionError("feature id count mismatch");

  // Keep the columns used by the most rows.
  std::vector<std::size_t> usage(static_cast<std::size_t>(X.cols()), 0);
  for (Eigen::Index row = 0; row < X.outerSize(); ++row) {
    for (DesignMatrix::InnerIterator it(X, row); it; ++it) usage[static_cast<std::size_t>(it.index())] += it.value() != 0;
  }
  std::vector<int> keep;
  for (std::size_t c = 0; c < usage.size(); ++c) {
    if (usage[c] > 0) keep.push_back(static_cast<int>(c));
  }
  std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) { return usage[a] > usage[b]; });
  if (keep.size() > options.max_features) keep.resize(options.max_features);
  std::sort(keep.begin(), keep.end());
  if (keep.empty()) throw PreconditionError("no feature is nonzero on the training rows");

  std::vector<int> slot(usage.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) slot[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double, int>> triplets;
  for (Eigen::Index row = 0; row < X.outerSize(); ++row) {
    for (DesignMatrix::InnerIterator it(X, row); it; ++it) {
      const int s = slot[static_cast<std::size_t>(it.index())];
      if (s >= 0) triplets.emplace_back(static_cast<int>(row), s, it.value());
    }
  }
  DesignMatrix reduced(X.rows(), static_cast<Eigen::Index>(keep.size()));
  reduced.setFromTriplets(triplets.begin(), triplets.end());

  const auto fit = fit_logistic(reduced, y, options.fit);
  GlobalExplanation out;
  out.ridge = options.fit.ridge;
  out.iterations = fit.iterations;
  out.gradient_norm = fit.gradient_norm;
  out.training_rows = static_cast<std::size_t>(X.rows());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    out.features.push_back({feature_ids[static_cast<std::size_t>(keep[i])], fit.beta[j], fit.se[j], fit.t[j]});
  }
  std::sort(out.features.begin(), out.features.end(), [](const FeatureImportance& a, const FeatureImportance& b) {
    const double ta = std::abs(a.t), tb = std::abs(b.t);
    return ta != tb ? ta > tb : a.feature < b.feature;
  });
  return out;
}

LocalExplanation explain_local(const SparseEmbedding& embedding, NodeId u, NodeId v) {
  const SparseRows& R = embedding.rows;
  if (u >= R.rows() || v >= R.rows()) throw PreconditionError("node outside the embedding");
  LocalExplanation e;
  e.u = u;
  e.v = v;
  SparseRows::InnerIterator i(R, u), j(R, v);
  // Same traversal as sparse_row_dot so the total matches the score exactly.
  while (i || j) {
    ++e.support_union;
    if (!j || (i && i.index() < j.index())) {
      ++i;
    } else if (!i || j.index() < i.index()) {
      ++j;
    } else {
      const double product = i.value() * j.value();
      e.total += product;
      if (product != 0.0) e.contributions.push_back({static_cast<std::uint32_t>(i.index()), product});
      ++i;
      ++j;
    }
  }
  sort_contributions(e.contributions);
  return e;
}

LocalExplanation explain_local_weighted(const SparseEmbedding& embedding, NodeId u, NodeId v,
                                        const GlobalExplanation& global) {
  LocalExplanation e = explain_local(embedding, u, v);
  std::vector<double> beta(embedding.feature_count(), 0.0);
  for (const auto& f : global.features) {
    if (f.feature < beta.size()) beta[f.feature] = f.beta;
  }
  e.weighted = true;
  e.total = 0.0;
  std::vector<Contribution> kept;
  for (auto c : e.contributions) {
    c.value *= beta[c.feature];
    if (c.value == 0.0) continue;
    e.total += c.value;
    kept.push_back(c);
  }
  sort_contributions(kept);
  e.contributions = std::move(kept);
  return e;
}

Histogram contribution_histogram(const LocalExplanation& e, int bins) {
  if (bins < 1) throw PreconditionError("histogram needs at least one bin");
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  h.zero_count = e.support_union - e.contributions.size();
  if (e.contributions.empty()) return h;
  h.hi = e.contributions.front().value;
  h.lo = std::min(0.0, e.contributions.back().value);
  const double width = (h.hi - h.lo) / bins;
  for (const auto& c : e.contributions) {
    auto b = width > 0 ? static_cast<std::size_t>((c.value - h.lo) / width) : h.counts.size() - 1;
    h.counts[std::min(b, h.counts.size() - 1)]++;
  }
  return h;
}

nlohmann::json to_json(const GlobalExplanation& g, const std::vector<std::string>& names, std::size_t top) {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < std::min(top, g.features.size()); ++i) {
    const auto& f = g.features[i];
    features.push_back({{"feature", names.at(f.feature)},
                        {"beta", f.beta},
                        {"se", f.se},
                        {"t", f.t},
                        {"abs_t", std::abs(f.t)}});
  }
  return {{"features", std::move(features)},
          {"ridge", g.ridge},
          {"iterations", g.iterations},
          {"gradient_norm", g.gradient_norm},
          {"training_rows", g.training_rows},
          {"fitted_features", g.features.size()}};
}

nlohmann::json to_json(const LocalExplanation& e, const std::vector<std::string>& names) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const auto& c : e.contributions) contributions.push_back({{"feature", names.at(c.feature)}, {"value", c.value}});
  return {{"u", names.at(e.u)},
          {"v", names.at(e.v)},
          {"total", e.total},
          {"weighted", e.weighted},
          {"support_union", e.support_union},
          {"contributions", std::move(contributions)}};
}

nlohmann::json to_json(const Histogram& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}, {"zero_count", h.zero_count}};
}

}  // namespace ontolink
