#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace ontolink {

namespace vocab {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view rdf_first = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
inline constexpr std::string_view rdf_rest = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
inline constexpr std::string_view rdf_nil = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
inline constexpr std::string_view subclass_of = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view equivalent_class = "http://www.w3.org/2002/07/owl#equivalentClass";
inline constexpr std::string_view restriction = "http://www.w3.org/2002/07/owl#Restriction";
inline constexpr std::string_view on_property = "http://www.w3.org/2002/07/owl#onProperty";
inline constexpr std::string_view some_values_from = "http://www.w3.org/2002/07/owl#someValuesFrom";
inline constexpr std::string_view all_values_from = "http://www.w3.org/2002/07/owl#allValuesFrom";
inline constexpr std::string_view union_of = "http://www.w3.org/2002/07/owl#unionOf";
inline constexpr std::string_view intersection_of = "http://www.w3.org/2002/07/owl#intersectionOf";
inline constexpr std::string_view complement_of = "http://www.w3.org/2002/07/owl#complementOf";
inline constexpr std::string_view annotation_property = "http://www.w3.org/2002/07/owl#AnnotationProperty";

// True for IRIs in the RDF, RDFS, OWL or XSD namespaces.
bool is_builtin(std::string_view iri);
}  // namespace vocab

enum class TermKind : std::uint8_t { Iri, Blank };

struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;

  static Term iri(std::string v) { return {TermKind::Iri, std::move(v)}; }
  static Term blank(std::string v) { return {TermKind::Blank, std::move(v)}; }

  bool is_blank() const { return kind == TermKind::Blank; }
  // `<iri>` or `_:label`, as written in N-Triples.
  std::string to_ntriples() const;
  // Bare IRI, or `_:label` for blank nodes. Used as graph node names.
  std::string name() const;

  auto operator<=>(const Term&) const = default;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>{}(t.value) ^ (static_cast<std::size_t>(t.kind) * 0x9e3779b97f4a7c15ULL);
  }
};

using TermId = std::uint32_t;

// Dense bijection between terms and ids 0..n-1 in order of first appearance.
class Interner {
 public:
  TermId intern(const Term& term);
  std::optional<TermId> find(const Term& term) const;
  const Term& lookup(TermId id) const { return terms_.at(id); }
  std::size_t size() const { return terms_.size(); }

 private:
  std::vector<Term> terms_;
  std::unordered_map<Term, TermId, TermHash> index_;
};

struct Triple {
  TermId s = 0;
  TermId p = 0;
  TermId o = 0;
  auto operator<=>(const Triple&) const = default;
};

// Deduplicated triples in insertion order. Immutable once parsing finishes.
class TripleStore {
 public:
  // Returns false when the triple was already present.
  bool insert(const Term& s, std::string_view predicate, const Term& o);

  const std::vector<Triple>& triples() const { return triples_; }
  const Interner& terms() const { return terms_; }
  const Term& term(TermId id) const { return terms_.lookup(id); }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  const std::map<TermId, std::size_t>& predicate_counts() const { return predicate_counts_; }

  std::size_t dropped_literals() const { return dropped_literals_; }
  std::size_t duplicate_lines() const { return duplicate_lines_; }
  void note_literal() { ++dropped_literals_; }

  // Set semantics: same triples (by term value), regardless of interner ids.
  bool same_triples(const TripleStore& other) const;

 private:
  struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
      return (static_cast<std::size_t>(t.s) * 0x9e3779b97f4a7c15ULL) ^
             (static_cast<std::size_t>(t.p) * 0xbf58476d1ce4e5b9ULL) ^ t.o;
    }
  };

  Interner terms_;
  std::vector<Triple> triples_;
  std::unordered_set<Triple, TripleHash> seen_;
  std::map<TermId, std::size_t> predicate_counts_;
  std::size_t dropped_literals_ = 0;
  std::size_t duplicate_lines_ = 0;
};

struct ParseOptions {
  // Prepended to IRIs that carry no scheme.
  std::optional<std::string> base;
  // Blank labels are rewritten to `<scope>b<ordinal>`. Empty picks a fresh
  // process-wide scope (d0, d1, ...) so two loaded documents never collide.
  std::string blank_scope;
};

TripleStore parse_document(std::istream& input, const ParseOptions& options = {});
TripleStore parse_document(std::string_view text, const ParseOptions& options = {});
TripleStore load_ntriples(const std::filesystem::path& path, const ParseOptions& options = {});

void write_ntriples(std::ostream& out, const TripleStore& store);

struct StatsReport {
  std::size_t triples = 0;
  std::size_t distinct_terms = 0;
  std::size_t predicates = 0;
  std::size_t blank_nodes = 0;
  std::size_t subsumption_axioms = 0;
  std::size_t restriction_nodes = 0;
  std::size_t dropped_literals = 0;
  std::map<std::string, std::size_t> per_predicate;
};

StatsReport stats(const TripleStore& store);
nlohmann::json to_json(const StatsReport& report);

}  // namespace ontolink
