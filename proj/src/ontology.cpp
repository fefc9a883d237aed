#include "ontoalign/ontology.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ontoalign/error.hpp"
#include "xml_reader.hpp"

namespace ontoalign {

namespace {

using detail::find_attr;
using detail::kOwlNs;
using detail::kRdfNs;
using detail::kRdfsNs;
using detail::kXmlNs;
using detail::qname;

const std::string kOwlThing = std::string(kOwlNs) + "Thing";

template <typename Id>
void sort_unique(std::vector<Id>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

std::string strip_fragment(std::string_view iri) {
  return std::string(iri.substr(0, iri.find('#')));
}

bool is_absolute(std::string_view ref) {
  const auto colon = ref.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  const auto delim = ref.find_first_of("/#?");
  return delim == std::string_view::npos || colon < delim;
}

std::string resolve(std::string_view base, std::string_view ref) {
  if (is_absolute(ref)) return std::string(ref);
  if (ref.empty()) return strip_fragment(base);
  if (ref.front() == '#') return strip_fragment(base) + std::string(ref);
  const std::string stem = strip_fragment(base);
  const auto slash = stem.rfind('/');
  if (slash == std::string::npos) return stem + std::string(ref);
  return stem.substr(0, slash + 1) + std::string(ref);
}

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  bool literal = false;
};

// Collects triples for the recognized vocabulary out of RDF/XML striped syntax.
// Blank nodes have an empty subject and never produce triples.
class RdfCollector {
 public:
  void start(const std::string& name, const detail::XmlAttributes& attrs) {
    std::string base = frames_.empty() ? std::string() : frames_.back().base;
    if (const auto* b = find_attr(attrs, qname(kXmlNs, "base"))) base = *b;

    const Kind parent = frames_.empty() ? Kind::Document : frames_.back().kind;
    Frame frame;
    frame.base = base;

    switch (parent) {
      case Kind::Document:
        if (name == qname(kRdfNs, "RDF")) {
          frame.kind = Kind::Root;
          break;
        }
        [[fallthrough]];
      case Kind::Root:
      case Kind::Property:
      case Kind::Collection:
        frame = node_element(name, attrs, std::move(base));
        if (parent == Kind::Property) {
          Frame& owner = frames_.back();
          owner.has_object = true;
          if (!owner.subject.empty() && !frame.subject.empty()) {
            triples_.push_back({owner.subject, owner.predicate, frame.subject, false});
          }
        }
        break;
      case Kind::Node:
        frame = property_element(name, attrs, std::move(base));
        break;
      case Kind::Skip:
        frame.kind = Kind::Skip;
        break;
    }
    frames_.push_back(std::move(frame));
  }

  void end() {
    Frame frame = std::move(frames_.back());
    frames_.pop_back();
    if (frame.kind == Kind::Property && !frame.has_object && !frame.subject.empty()) {
      triples_.push_back(
          {frame.subject, frame.predicate, std::string(detail::trim(frame.text)), true});
    }
  }

  void text(std::string_view s) {
    if (!frames_.empty() && frames_.back().kind == Kind::Property) frames_.back().text += s;
  }

  std::vector<Triple> take() { return std::move(triples_); }

 private:
  enum class Kind { Document, Root, Node, Property, Collection, Skip };

  struct Frame {
    Kind kind = Kind::Skip;
    std::string base;
    std::string subject;
    std::string predicate;
    std::string text;
    bool has_object = false;
  };

  Frame node_element(const std::string& name, const detail::XmlAttributes& attrs,
                     std::string base) {
    Frame frame;
    frame.kind = Kind::Node;
    if (const auto* about = find_attr(attrs, qname(kRdfNs, "about"))) {
      frame.subject = resolve(base, *about);
    } else if (const auto* id = find_attr(attrs, qname(kRdfNs, "ID"))) {
      frame.subject = strip_fragment(base) + "#" + *id;
    }
    if (!frame.subject.empty()) {
      if (name != qname(kRdfNs, "Description")) {
        triples_.push_back({frame.subject, std::string(kRdfNs) + "type",
                            detail::name_to_iri(name), false});
      }
      if (const auto* label = find_attr(attrs, qname(kRdfsNs, "label"))) {
        triples_.push_back({frame.subject, std::string(kRdfsNs) + "label", *label, true});
      }
    }
    frame.base = std::move(base);
    return frame;
  }

  Frame property_element(const std::string& name, const detail::XmlAttributes& attrs,
                         std::string base) {
    const Frame& owner = frames_.back();
    Frame frame;
    frame.base = base;
    frame.subject = owner.subject;
    frame.predicate = detail::name_to_iri(name);
    if (const auto* resource = find_attr(attrs, qname(kRdfNs, "resource"))) {
      frame.kind = Kind::Property;
      frame.has_object = true;
      if (!frame.subject.empty()) {
        triples_.push_back({frame.subject, frame.predicate, resolve(base, *resource), false});
      }
      return frame;
    }
    const auto* parse_type = find_attr(attrs, qname(kRdfNs, "parseType"));
    if (parse_type == nullptr) {
      frame.kind = Kind::Property;
    } else if (*parse_type == "Resource") {
      frame.kind = Kind::Node;  // property elements of an anonymous node
      frame.subject.clear();
    } else if (*parse_type == "Collection") {
      frame.kind = Kind::Collection;
    } else {
      frame.kind = Kind::Skip;
    }
    return frame;
  }

  std::vector<Frame> frames_;
  std::vector<Triple> triples_;
};

OntologyDraft draft_from_triples(const std::vector<Triple>& triples) {
  const std::string rdf_type = std::string(kRdfNs) + "type";
  const std::string owl_class = std::string(kOwlNs) + "Class";
  const std::string owl_object = std::string(kOwlNs) + "ObjectProperty";
  const std::string owl_datatype = std::string(kOwlNs) + "DatatypeProperty";
  const std::string owl_ontology = std::string(kOwlNs) + "Ontology";
  const std::string subclass_of = std::string(kRdfsNs) + "subClassOf";
  const std::string domain = std::string(kRdfsNs) + "domain";
  const std::string range = std::string(kRdfsNs) + "range";
  const std::string label = std::string(kRdfsNs) + "label";

  OntologyDraft draft;
  bool have_ontology_iri = false;
  std::map<std::string, std::size_t> property_slot;

  for (const auto& t : triples) {
    if (t.literal || t.predicate != rdf_type) continue;
    if (t.object == owl_class) {
      if (t.subject != kOwlThing) draft.classes.push_back(t.subject);
    } else if (t.object == owl_object || t.object == owl_datatype) {
      if (property_slot.contains(t.subject)) continue;
      property_slot.emplace(t.subject, draft.properties.size());
      draft.properties.push_back(
          {t.subject, t.object == owl_object ? PropertyKind::Object : PropertyKind::Datatype,
           {}, {}});
    } else if (t.object == owl_ontology && !have_ontology_iri) {
      draft.iri = t.subject;
      have_ontology_iri = true;
    }
  }

  for (const auto& t : triples) {
    if (t.literal) {
      if (t.predicate == label && !t.object.empty()) draft.labels.emplace(t.subject, t.object);
      continue;
    }
    if (t.object == kOwlThing) continue;
    if (t.predicate == subclass_of) {
      draft.subclass_of.emplace_back(t.subject, t.object);
    } else if (t.predicate == domain || t.predicate == range) {
      const auto slot = property_slot.find(t.subject);
      if (slot == property_slot.end()) continue;
      auto& prop = draft.properties[slot->second];
      (t.predicate == domain ? prop.domains : prop.ranges).push_back(t.object);
    }
  }
  return draft;
}

}  // namespace

std::string iri_fragment(std::string_view iri) {
  if (const auto hash = iri.rfind('#'); hash != std::string_view::npos) {
    return std::string(iri.substr(hash + 1));
  }
  std::string_view trimmed = iri;
  while (!trimmed.empty() && trimmed.back() == '/') trimmed.remove_suffix(1);
  if (const auto slash = trimmed.rfind('/'); slash != std::string_view::npos) {
    return std::string(trimmed.substr(slash + 1));
  }
  return std::string(trimmed);
}

Ontology Ontology::from_draft(const OntologyDraft& draft) {
  std::set<std::string> concept_set(draft.classes.begin(), draft.classes.end());
  for (const auto& [child, parent] : draft.subclass_of) {
    concept_set.insert(child);
    concept_set.insert(parent);
  }
  for (const auto& p : draft.properties) {
    concept_set.insert(p.domains.begin(), p.domains.end());
    if (p.kind == PropertyKind::Object) concept_set.insert(p.ranges.begin(), p.ranges.end());
  }

  Ontology o;
  o.iri_ = draft.iri;
  o.concept_iris_.assign(concept_set.begin(), concept_set.end());
  for (std::uint32_t i = 0; i < o.concept_iris_.size(); ++i) {
    o.concept_index_.emplace(o.concept_iris_[i], ConceptId{i});
  }
  auto label_of = [&](const std::string& iri) {
    const auto it = draft.labels.find(iri);
    return it != draft.labels.end() ? it->second : iri_fragment(iri);
  };
  o.labels_.reserve(o.concept_iris_.size());
  for (const auto& iri : o.concept_iris_) o.labels_.push_back(label_of(iri));

  for (const auto& [child, parent] : draft.subclass_of) {
    o.edges_.emplace_back(o.concept_index_.at(child), o.concept_index_.at(parent));
  }
  sort_unique(o.edges_);
  o.parents_.resize(o.concept_count());
  o.children_.resize(o.concept_count());
  for (const auto& [child, parent] : o.edges_) {
    o.parents_[child.value].push_back(parent);
    o.children_[parent.value].push_back(child);
  }
  for (auto& c : o.children_) sort_unique(c);

  // Merge repeated declarations of one property, then order by IRI.
  std::map<std::string, PropertyDecl> merged;
  for (const auto& p : draft.properties) {
    auto [it, inserted] = merged.try_emplace(p.iri);
    PropertyDecl& decl = it->second;
    if (inserted) {
      decl.iri = p.iri;
      decl.kind = p.kind;
      decl.label = label_of(p.iri);
    }
    for (const auto& d : p.domains) decl.domains.push_back(o.concept_index_.at(d));
    if (decl.kind == PropertyKind::Object) {
      for (const auto& r : p.ranges) decl.ranges.push_back(o.concept_index_.at(r));
    }
  }
  for (auto& [iri, decl] : merged) {
    decl.id = PropertyId{static_cast<std::uint32_t>(o.properties_.size())};
    sort_unique(decl.domains);
    sort_unique(decl.ranges);
    o.property_index_.emplace(iri, decl.id);
    o.properties_.push_back(std::move(decl));
  }
  return o;
}

const std::string& Ontology::concept_iri(ConceptId id) const {
  if (id.value >= concept_iris_.size()) throw LookupError("unknown concept id " + std::to_string(id.value));
  return concept_iris_[id.value];
}

std::optional<ConceptId> Ontology::find_concept(std::string_view iri) const {
  const auto it = concept_index_.find(std::string(iri));
  if (it == concept_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<ConceptId>& Ontology::parents(ConceptId id) const {
  if (id.value >= parents_.size()) throw LookupError("unknown concept id " + std::to_string(id.value));
  return parents_[id.value];
}

const std::vector<ConceptId>& Ontology::children(ConceptId id) const {
  if (id.value >= children_.size()) throw LookupError("unknown concept id " + std::to_string(id.value));
  return children_[id.value];
}

const PropertyDecl& Ontology::property(PropertyId id) const {
  if (id.value >= properties_.size()) throw LookupError("unknown property id " + std::to_string(id.value));
  return properties_[id.value];
}

std::optional<PropertyId> Ontology::find_property(std::string_view iri) const {
  const auto it = property_index_.find(std::string(iri));
  if (it == property_index_.end()) return std::nullopt;
  return it->second;
}

Ontology parse_ontology(std::string_view document) {
  RdfCollector collector;
  detail::XmlReader reader({
      [&](const std::string& name, const detail::XmlAttributes& attrs) { collector.start(name, attrs); },
      [&](const std::string&) { collector.end(); },
      [&](std::string_view text) { collector.text(text); },
  });
  reader.parse(document);
  return Ontology::from_draft(draft_from_triples(collector.take()));
}

std::string entity_label(const Ontology& o, ConceptId id) {
  if (id.value >= o.concept_count()) throw LookupError("unknown concept id " + std::to_string(id.value));
  return o.labels()[id.value];
}

std::string entity_label(const Ontology& o, PropertyId id) { return o.property(id).label; }

}  // namespace ontoalign
