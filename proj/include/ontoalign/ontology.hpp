#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ontoalign {

/// Index of a concept inside one Ontology. Ids follow IRI order, so sorting
/// ids sorts by IRI.
struct ConceptId {
  std::uint32_t value = 0;
  auto operator<=>(const ConceptId&) const = default;
};

struct PropertyId {
  std::uint32_t value = 0;
  auto operator<=>(const PropertyId&) const = default;
};

enum class PropertyKind { Object, Datatype };

struct PropertyDecl {
  PropertyId id;
  std::string iri;
  PropertyKind kind = PropertyKind::Object;
  std::vector<ConceptId> domains;  // sorted, unique
  std::vector<ConceptId> ranges;   // sorted, unique; always empty for Datatype
  std::string label;

  bool operator==(const PropertyDecl&) const = default;
};

using SubclassEdge = std::pair<ConceptId, ConceptId>;  // (child, parent)

/// Raw declarations collected from a document, keyed by IRI. Several
/// declarations of the same IRI merge; domains and ranges union.
struct OntologyDraft {
  struct Property {
    std::string iri;
    PropertyKind kind = PropertyKind::Object;
    std::vector<std::string> domains;
    std::vector<std::string> ranges;
  };

  std::string iri;
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, std::string>> subclass_of;  // (child, parent)
  std::vector<Property> properties;
  std::unordered_map<std::string, std::string> labels;  // first rdfs:label per IRI
};

/// Named-concept graph of one ontology. Immutable once built.
class Ontology {
 public:
  Ontology() = default;

  /// Concepts are indexed in IRI order. Edge and object-property endpoints
  /// that were never declared become concepts as well.
  static Ontology from_draft(const OntologyDraft& draft);

  const std::string& iri() const { return iri_; }
  std::size_t concept_count() const { return concept_iris_.size(); }
  const std::vector<std::string>& concept_iris() const { return concept_iris_; }
  const std::string& concept_iri(ConceptId id) const;
  std::optional<ConceptId> find_concept(std::string_view iri) const;

  const std::vector<SubclassEdge>& subclass_edges() const { return edges_; }
  const std::vector<ConceptId>& parents(ConceptId id) const;
  const std::vector<ConceptId>& children(ConceptId id) const;

  const std::vector<PropertyDecl>& properties() const { return properties_; }
  const PropertyDecl& property(PropertyId id) const;
  std::optional<PropertyId> find_property(std::string_view iri) const;

  /// One label per concept; rdfs:label if present, else the IRI fragment.
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const Ontology& other) const {
    return iri_ == other.iri_ && concept_iris_ == other.concept_iris_ &&
           edges_ == other.edges_ && properties_ == other.properties_ &&
           labels_ == other.labels_;
  }

 private:
  std::string iri_;
  std::vector<std::string> concept_iris_;
  std::vector<std::string> labels_;
  std::vector<SubclassEdge> edges_;
  std::vector<std::vector<ConceptId>> parents_;
  std::vector<std::vector<ConceptId>> children_;
  std::vector<PropertyDecl> properties_;
  std::unordered_map<std::string, ConceptId> concept_index_;
  std::unordered_map<std::string, PropertyId> property_index_;
};

/// Parses the supported RDF/XML subset. Throws ParseError on malformed XML.
Ontology parse_ontology(std::string_view document);

std::string entity_label(const Ontology& o, ConceptId id);
std::string entity_label(const Ontology& o, PropertyId id);

/// Fragment after '#', else the last '/' segment, else the whole IRI.
std::string iri_fragment(std::string_view iri);

}  // namespace ontoalign
