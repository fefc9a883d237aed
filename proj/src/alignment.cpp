#include "ontoalign/alignment.hpp"

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>

#include "xml_reader.hpp"

namespace ontoalign {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string entity_reference(const detail::XmlAttributes& attrs) {
  if (const auto* r = detail::find_attr(attrs, detail::qname(detail::kRdfNs, "resource"))) return *r;
  if (const auto* r = detail::find_attr(attrs, detail::qname(detail::kRdfNs, "about"))) return *r;
  return {};
}

}  // namespace

std::vector<const AlignmentCell*> ReferenceAlignment::equivalences() const {
  std::vector<const AlignmentCell*> out;
  for (const auto& c : cells) {
    if (c.relation == "=") out.push_back(&c);
  }
  return out;
}

ReferenceAlignment parse_reference_alignment(std::string_view document) {
  ReferenceAlignment result;
  std::optional<AlignmentCell> cell;
  bool have_entity1 = false;
  bool have_entity2 = false;
  std::vector<std::string> stack;
  std::string text;

  auto on_start = [&](const std::string& name, const detail::XmlAttributes& attrs) {
    const auto local = detail::local_name(name);
    text.clear();
    if (local == "Cell") {
      cell.emplace();
      have_entity1 = have_entity2 = false;
    } else if (cell && (local == "entity1" || local == "entity2")) {
      const std::string ref = entity_reference(attrs);
      if (!ref.empty()) {
        (local == "entity1" ? cell->source_entity : cell->target_entity) = ref;
        (local == "entity1" ? have_entity1 : have_entity2) = true;
      }
    } else if (!cell && (local == "onto1" || local == "onto2")) {
      const std::string ref = entity_reference(attrs);
      if (!ref.empty()) (local == "onto1" ? result.source_ontology : result.target_ontology) = ref;
    } else if (!cell && local == "Ontology" && !stack.empty()) {
      const auto parent = detail::local_name(stack.back());
      const std::string ref = entity_reference(attrs);
      if (!ref.empty() && parent == "onto1") result.source_ontology = ref;
      if (!ref.empty() && parent == "onto2") result.target_ontology = ref;
    }
    stack.push_back(name);
  };

  auto on_end = [&](const std::string& name) {
    stack.pop_back();
    const auto local = detail::local_name(name);
    const auto value = detail::trim(text);
    if (cell) {
      if (local == "relation" && !value.empty()) {
        cell->relation = std::string(value);
      } else if (local == "measure" && !value.empty()) {
        double m = 1.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), m);
        if (ec == std::errc()) cell->measure = m;
      } else if ((local == "entity1" || local == "entity2") && !value.empty()) {
        (local == "entity1" ? cell->source_entity : cell->target_entity) = std::string(value);
        (local == "entity1" ? have_entity1 : have_entity2) = true;
      } else if (local == "Cell") {
        if (have_entity1 && have_entity2) {
          result.cells.push_back(std::move(*cell));
        } else {
          ++result.skipped_cells;
        }
        cell.reset();
      }
    } else if ((local == "onto1" || local == "onto2") && !value.empty()) {
      // plain-text form: <onto1>http://...</onto1>
      (local == "onto1" ? result.source_ontology : result.target_ontology) = std::string(value);
    }
    text.clear();
  };

  detail::XmlReader reader({on_start, on_end, [&](std::string_view s) { text += s; }});
  reader.parse(document);
  return result;
}

std::string write_alignment(const ReferenceAlignment& alignment) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      << "<rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment\"\n"
      << "         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\"\n"
      << "         xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">\n"
      << "<Alignment>\n"
      << "  <xml>yes</xml>\n"
      << "  <level>0</level>\n"
      << "  <type>**</type>\n";
  if (!alignment.source_ontology.empty()) {
    out << "  <onto1><Ontology rdf:about=\"" << xml_escape(alignment.source_ontology)
        << "\"/></onto1>\n";
  }
  if (!alignment.target_ontology.empty()) {
    out << "  <onto2><Ontology rdf:about=\"" << xml_escape(alignment.target_ontology)
        << "\"/></onto2>\n";
  }
  char measure[32];
  for (const auto& c : alignment.cells) {
    std::snprintf(measure, sizeof(measure), "%.6f", c.measure);
    out << "  <map>\n"
        << "    <Cell>\n"
        << "      <entity1 rdf:resource=\"" << xml_escape(c.source_entity) << "\"/>\n"
        << "      <entity2 rdf:resource=\"" << xml_escape(c.target_entity) << "\"/>\n"
        << "      <relation>" << xml_escape(c.relation) << "</relation>\n"
        << "      <measure rdf:datatype=\"xsd:float\">" << measure << "</measure>\n"
        << "    </Cell>\n"
        << "  </map>\n";
  }
  out << "</Alignment>\n</rdf:RDF>\n";
  return out.str();
}

}  // namespace ontoalign
