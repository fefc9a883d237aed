#pragma once

#include <cstddef>
#include <vector>

#include "ontoalign/ontology.hpp"

namespace ontoalign {

struct ContextConfig {
  std::size_t max_depth = 6;      // nodes kept per lineage path
  std::size_t max_paths = 8;      // lineage paths kept per concept
  std::size_t max_neighbors = 16; // entries kept per one-hop facet
};

using LineagePath = std::vector<ConceptId>;  // nearest ancestor first

/// The four context facets of one concept. Datatype neighbors are the
/// datatype properties themselves; their labels stand in for the literal node.
struct ContextBundle {
  std::vector<LineagePath> lineage_paths;
  std::vector<ConceptId> children;
  std::vector<ConceptId> obj_neighbors;
  std::vector<PropertyId> data_neighbors;

  bool operator==(const ContextBundle&) const = default;
};

/// All maximal simple upward paths from `c`, in lexicographic IRI order.
/// A path ends at a concept whose parents are all already on the path (a root
/// when the graph is acyclic). Paths are cut at `max_depth` nodes, duplicates
/// produced by the cut are dropped, and at most `max_paths` are returned.
std::vector<LineagePath> enumerate_lineage_paths(const Ontology& o, ConceptId c,
                                                 std::size_t max_depth, std::size_t max_paths);

std::vector<ConceptId> one_hop_children(const Ontology& o, ConceptId c);

struct PropertyNeighbors {
  std::vector<ConceptId> obj;
  std::vector<PropertyId> data;
};

/// Object-property neighbors in both directions, plus datatype properties whose
/// domain contains `c`.
PropertyNeighbors property_neighbors(const Ontology& o, ConceptId c);

ContextBundle build_context(const Ontology& o, ConceptId c, const ContextConfig& cfg);

}  // namespace ontoalign
