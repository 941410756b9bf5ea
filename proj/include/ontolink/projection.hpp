#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ontolink/graph.hpp"
#include "ontolink/triples.hpp"

namespace ontolink {

enum class ProjectionMode {
  Raw,    // every triple becomes an edge, blank nodes included
  Rules,  // restrictions and class expressions collapsed onto named classes
};

ProjectionMode parse_projection_mode(std::string_view text);

// Where each input triple went. Every triple lands in exactly one bucket:
// passthrough + consumed + dropped() == input.
struct ProjectionTally {
  std::size_t input = 0;
  std::size_t passthrough = 0;        // one triple -> one edge
  std::size_t consumed = 0;           // absorbed into a class-expression projection
  std::size_t dropped_blank = 0;      // blank-node triples no rule consumed
  std::size_t dropped_vocabulary = 0; // declarations, domain/range, other built-in predicates
  std::size_t dropped_annotation = 0; // predicates declared owl:AnnotationProperty
  std::size_t incomplete_restrictions = 0;  // warning: restriction without onProperty or filler
  std::size_t edges = 0;

  std::size_t dropped() const { return dropped_blank + dropped_vocabulary + dropped_annotation; }
};

nlohmann::json to_json(const ProjectionTally& tally);

// Throws Error when a blank-node list or class expression is cyclic.
HeteroGraph project(const TripleStore& store, ProjectionMode mode, ProjectionTally* tally = nullptr);

}  // namespace ontolink
