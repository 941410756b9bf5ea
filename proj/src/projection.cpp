#include "ontolink/projection.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "ontolink/errors.hpp"

namespace ontolink {

ProjectionMode parse_projection_mode(std::string_view text) {
  if (text == "raw") return ProjectionMode::Raw;
  if (text == "rules") return ProjectionMode::Rules;
  throw Error("unknown projection mode: " + std::string(text) + " (expected raw or rules)");
}

nlohmann::json to_json(const ProjectionTally& t) {
  return {
      {"input", t.input},
      {"passthrough", t.passthrough},
      {"consumed", t.consumed},
      {"dropped_blank", t.dropped_blank},
      {"dropped_vocabulary", t.dropped_vocabulary},
      {"dropped_annotation", t.dropped_annotation},
      {"incomplete_restrictions", t.incomplete_restrictions},
      {"edges", t.edges},
  };
}

namespace {

class RuleProjector {
 public:
  RuleProjector(const TripleStore& store, ProjectionTally& tally) : store_(store), tally_(tally) {
    const auto& triples = store_.triples();
    consumed_.assign(triples.size(), false);
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const auto& t = triples[i];
      if (store_.term(t.s).is_blank()) by_subject_[t.s].push_back(i);
      if (iri(t.p) == vocab::rdf_type && iri(t.o) == vocab::annotation_property) annotation_.insert(t.s);
    }
  }

  HeteroGraph run() {
    const auto& triples = store_.triples();
    for (std::size_t i = 0; i < triples.size(); ++i) {
      if (consumed_[i]) continue;
      const auto& t = triples[i];
      const Term& s = store_.term(t.s);
      const Term& o = store_.term(t.o);
      const std::string_view p = iri(t.p);
      if (s.is_blank()) continue;  // settled after the pass

      if (p == vocab::subclass_of || p == vocab::equivalent_class) {
        if (!o.is_blank()) {
          emit(s.value, p, o.value);
          ++tally_.passthrough;
        } else if (expand(t.s, t.o, std::string(p), false)) {
          consumed_[i] = true;
        } else {
          ++tally_.dropped_blank;
        }
        continue;
      }
      if (o.is_blank()) {
        ++tally_.dropped_blank;
      } else if (p == vocab::rdf_type) {
        if (vocab::is_builtin(o.value)) {
          ++tally_.dropped_vocabulary;
        } else {
          emit(s.value, p, o.value);
          ++tally_.passthrough;
        }
      } else if (annotation_.contains(t.p)) {
        ++tally_.dropped_annotation;
      } else if (vocab::is_builtin(p)) {
        ++tally_.dropped_vocabulary;
      } else {
        emit(s.value, p, o.value);
        ++tally_.passthrough;
      }
    }
    for (std::size_t i = 0; i < triples.size(); ++i) {
      if (consumed_[i]) {
        ++tally_.consumed;
      } else if (store_.term(triples[i].s).is_blank()) {
        ++tally_.dropped_blank;
      }
    }
    tally_.edges = graph_.edges.size();
    return std::move(graph_);
  }

 private:
  std::string_view iri(TermId id) const { return store_.term(id).value; }

  void emit(std::string_view s, std::string_view p, std::string_view o) {
    if (!emitted_.emplace(std::string(s), std::string(p), std::string(o)).second) return;
    graph_.add_edge(s, p, o);
  }

  std::optional<TermId> object_of(TermId subject, std::string_view predicate) const {
    auto it = by_subject_.find(subject);
    if (it == by_subject_.end()) return std::nullopt;
    for (std::size_t i : it->second) {
      const auto& t = store_.triples()[i];
      if (iri(t.p) == predicate) return t.o;
    }
    return std::nullopt;
  }

  bool has_type(TermId subject, std::string_view type) const {
    auto it = by_subject_.find(subject);
    if (it == by_subject_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](std::size_t i) {
      const auto& t = store_.triples()[i];
      return iri(t.p) == vocab::rdf_type && iri(t.o) == type;
    });
  }

  void consume_subject(TermId subject) {
    auto it = by_subject_.find(subject);
    if (it == by_subject_.end()) return;
    for (std::size_t i : it->second) consumed_[i] = true;
  }

  struct PathGuard {
    std::vector<TermId>& path;
    PathGuard(std::vector<TermId>& p, TermId node, const TripleStore& store) : path(p) {
      if (std::find(path.begin(), path.end(), node) != path.end()) {
        throw Error("cyclic blank-node structure at " + store.term(node).name());
      }
      path.push_back(node);
    }
    ~PathGuard() { path.pop_back(); }
  };

  // Projects the class expression rooted at blank node `node` onto edges from
  // `anchor`. Returns false when the node is not a recognised expression.
  bool expand(TermId anchor, TermId node, const std::string& label, bool in_restriction) {
    PathGuard guard(path_, node, store_);

    const auto property = object_of(node, vocab::on_property);
    auto filler = object_of(node, vocab::some_values_from);
    if (!filler) filler = object_of(node, vocab::all_values_from);
    if (property || filler || has_type(node, vocab::restriction)) {
      if (!property || !filler || store_.term(*property).is_blank()) {
        ++tally_.incomplete_restrictions;
        return false;
      }
      consume_subject(node);
      const std::string inner = in_restriction ? label : std::string(iri(*property));
      expand_term(anchor, *filler, inner, true);
      return true;
    }

    auto list = object_of(node, vocab::union_of);
    if (!list) list = object_of(node, vocab::intersection_of);
    if (list) {
      consume_subject(node);
      expand_list(anchor, *list, label, in_restriction);
      return true;
    }

    if (object_of(node, vocab::complement_of)) {
      consume_subject(node);
      return true;
    }
    return false;
  }

  void expand_term(TermId anchor, TermId term, const std::string& label, bool in_restriction) {
    const Term& t = store_.term(term);
    if (t.is_blank()) {
      expand(anchor, term, label, in_restriction);
    } else if (t.value != vocab::rdf_nil) {
      emit(store_.term(anchor).value, label, t.value);
    }
  }

  void expand_list(TermId anchor, TermId cell, const std::string& label, bool in_restriction) {
    std::vector<TermId> cells;
    while (store_.term(cell).is_blank()) {
      if (std::find(cells.begin(), cells.end(), cell) != cells.end()) {
        throw Error("cyclic RDF list at " + store_.term(cell).name());
      }
      cells.push_back(cell);
      consume_subject(cell);
      if (auto first = object_of(cell, vocab::rdf_first)) {
        PathGuard guard(path_, cell, store_);
        expand_term(anchor, *first, label, in_restriction);
      }
      auto rest = object_of(cell, vocab::rdf_rest);
      if (!rest) break;
      cell = *rest;
    }
  }

  const TripleStore& store_;
  ProjectionTally& tally_;
  HeteroGraph graph_;
  std::vector<bool> consumed_;
  std::unordered_map<TermId, std::vector<std::size_t>> by_subject_;
  std::unordered_set<TermId> annotation_;
  std::set<std::tuple<std::string, std::string, std::string>> emitted_;
  std::vector<TermId> path_;
};

}  // namespace

HeteroGraph project(const TripleStore& store, ProjectionMode mode, ProjectionTally* tally) {
  ProjectionTally local;
  ProjectionTally& t = tally ? *tally : local;
  t = ProjectionTally{};
  t.input = store.size();

  if (mode == ProjectionMode::Raw) {
    HeteroGraph g;
    for (const auto& triple : store.triples()) {
      g.add_edge(store.term(triple.s).name(), store.term(triple.p).value, store.term(triple.o).name());
    }
    t.passthrough = store.size();
    t.edges = g.edges.size();
    return g;
  }
  return RuleProjector(store, t).run();
}

}  // namespace ontolink
