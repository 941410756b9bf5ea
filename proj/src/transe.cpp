#include "ontolink/transe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ontolink/errors.hpp"
#include "ontolink/random.hpp"

namespace ontolink {

namespace {

double renormalize_rows(KGEmbedding::Matrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
    worst = std::max(worst, std::abs(m.row(i).norm() - 1.0));
  }
  return worst;
}

}  // namespace

KGEmbedding transe_fit(const HeteroGraph& graph, const TransEParams& p) {
  if (p.dimensions < 1) throw PreconditionError("TransE dimension must be positive");
  if (graph.edges.empty()) throw PreconditionError("TransE needs at least one edge");
  if (p.epochs < 0 || p.negatives_per_positive < 1) throw PreconditionError("invalid TransE schedule");
  const auto n = static_cast<Eigen::Index>(graph.nodes.size());
  const auto r = static_cast<Eigen::Index>(graph.predicates.size());
  const Eigen::Index d = p.dimensions;
  if (n < 2) throw PreconditionError("TransE needs at least two entities to corrupt triples");

  Rng rng = make_rng(p.seed, 0x7a45e);
  const double bound = 6.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> init(-bound, bound);

  KGEmbedding e;
  e.entities.resize(n, d);
  e.relations.resize(r, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) e.entities(i, k) = init(rng);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < d; ++k) e.relations(i, k) = init(rng);
  renormalize_rows(e.relations);
  renormalize_rows(e.entities);

  std::vector<std::size_t> order(graph.edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::uniform_int_distribution<Eigen::Index> entity(0, n - 1);
  std::bernoulli_distribution corrupt_head(0.5);
  const double lr = p.learning_rate;

  Eigen::RowVectorXd pos(d), neg(d);
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t idx : order) {
      const auto& t = graph.edges[idx];
      for (int k = 0; k < p.negatives_per_positive; ++k) {
        Eigen::Index hs = t.s, ho = t.o;
        const bool head = corrupt_head(rng);
        Eigen::Index replacement = entity(rng);
        while (replacement == (head ? hs : ho)) replacement = entity(rng);
        (head ? hs : ho) = replacement;

        pos = e.entities.row(t.s) + e.relations.row(t.p) - e.entities.row(t.o);
        neg = e.entities.row(hs) + e.relations.row(t.p) - e.entities.row(ho);
        const double dp = pos.norm();
        const double dn = neg.norm();
        const double violation = p.margin + dp - dn;
        if (violation <= 0.0) continue;
        loss += violation;

        if (dp > 1e-12) pos /= dp; else pos.setZero();
        if (dn > 1e-12) neg /= dn; else neg.setZero();
        e.entities.row(t.s) -= lr * pos;
        e.entities.row(t.o) += lr * pos;
        e.relations.row(t.p) -= lr * (pos - neg);
        e.entities.row(hs) += lr * neg;
        e.entities.row(ho) -= lr * neg;
      }
    }
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "TransE loss became non-finite at epoch " << epoch << " (loss " << loss << ", lr " << lr << ")";
      throw Error(msg.str());
    }
    e.epoch_loss.push_back(loss);
    e.epoch_norm_error.push_back(renormalize_rows(e.entities));
  }
  return e;
}

void TransEScorer::fit(const FitContext& context) {
  TransEParams p = params_;
  p.seed = context.seed;
  if (context.hetero) {
    embedding_ = transe_fit(*context.hetero, p);
    return;
  }
  HeteroGraph single;
  for (NodeId u = 0; u < context.graph.node_count(); ++u) single.add_node(std::to_string(u));
  single.add_predicate("linked");
  for (const auto& edge : context.graph.edges()) single.edges.push_back({edge.u, 0, edge.v});
  embedding_ = transe_fit(single, p);
}

}  // namespace ontolink
