#include <gtest/gtest.h>

#include "ontoalign/dataset_loader.hpp"
#include "ontoalign/error.hpp"
#include "ontoalign/ontology.hpp"
#include "support.hpp"

namespace ontoalign {
namespace {

std::string doc(const std::string& body, const std::string& extra_ns = "") {
  return R"(<?xml version="1.0"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#"
         xml:base="http://x.org/onto")" +
         extra_ns + ">\n" + body + "\n</rdf:RDF>\n";
}

TEST(ParseOntology, TwoClassesOneEdge) {
  const auto o = parse_ontology(doc(R"(
  <owl:Ontology rdf:about="http://x.org/onto"/>
  <owl:Class rdf:about="#A"><rdfs:subClassOf rdf:resource="#B"/></owl:Class>
  <owl:Class rdf:about="#B"/>)"));
  EXPECT_EQ(o.iri(), "http://x.org/onto");
  ASSERT_EQ(o.concept_count(), 2U);
  EXPECT_EQ(o.concept_iri(ConceptId{0}), "http://x.org/onto#A");
  ASSERT_EQ(o.subclass_edges().size(), 1U);
  EXPECT_EQ(o.subclass_edges()[0], (SubclassEdge{ConceptId{0}, ConceptId{1}}));
  EXPECT_EQ(o.parents(ConceptId{0}), std::vector<ConceptId>{ConceptId{1}});
  EXPECT_EQ(o.children(ConceptId{1}), std::vector<ConceptId>{ConceptId{0}});
}

TEST(ParseOntology, MissingOntologyIriIsEmpty) {
  const auto o = parse_ontology(doc(R"(<owl:Class rdf:about="#A"/>)"));
  EXPECT_EQ(o.iri(), "");
  EXPECT_EQ(o.concept_count(), 1U);
}

TEST(ParseOntology, ObjectAndDatatypeProperties) {
  const auto o = parse_ontology(doc(R"(
  <owl:Class rdf:about="#A"/>
  <owl:Class rdf:about="#B"/>
  <owl:ObjectProperty rdf:about="#p">
    <rdfs:domain rdf:resource="#A"/>
    <rdfs:range rdf:resource="#B"/>
  </owl:ObjectProperty>
  <owl:ObjectProperty rdf:about="#p"><rdfs:domain rdf:resource="#B"/></owl:ObjectProperty>
  <owl:DatatypeProperty rdf:about="#hasName">
    <rdfs:domain rdf:resource="#A"/>
    <rdfs:range rdf:resource="http://www.w3.org/2001/XMLSchema#string"/>
  </owl:DatatypeProperty>)"));
  ASSERT_EQ(o.properties().size(), 2U);
  const auto& name = o.property(*o.find_property("http://x.org/onto#hasName"));
  EXPECT_EQ(name.kind, PropertyKind::Datatype);
  EXPECT_EQ(name.domains, std::vector<ConceptId>{ConceptId{0}});
  EXPECT_TRUE(name.ranges.empty());
  EXPECT_EQ(name.label, "hasName");
  const auto& p = o.property(*o.find_property("http://x.org/onto#p"));
  EXPECT_EQ(p.kind, PropertyKind::Object);
  // repeated declarations merge their domains
  EXPECT_EQ(p.domains, (std::vector<ConceptId>{ConceptId{0}, ConceptId{1}}));
  EXPECT_EQ(p.ranges, std::vector<ConceptId>{ConceptId{1}});
  // the datatype range never becomes a concept
  EXPECT_EQ(o.concept_count(), 2U);
}

TEST(ParseOntology, LabelsAndFragments) {
  const auto o = parse_ontology(doc(R"(
  <owl:Class rdf:about="#PCMember"><rdfs:label xml:lang="en">Program Committee</rdfs:label></owl:Class>
  <owl:Class rdf:about="#PaperReview"/>
  <owl:Class rdf:about="http://x.org/onto/Meta_Review"/>)"));
  EXPECT_EQ(entity_label(o, *o.find_concept("http://x.org/onto#PCMember")), "Program Committee");
  EXPECT_EQ(entity_label(o, *o.find_concept("http://x.org/onto#PaperReview")), "PaperReview");
  EXPECT_EQ(entity_label(o, *o.find_concept("http://x.org/onto/Meta_Review")), "Meta_Review");
  EXPECT_THROW(entity_label(o, ConceptId{99}), LookupError);
  EXPECT_THROW(entity_label(o, PropertyId{0}), LookupError);
}

TEST(ParseOntology, IriFragment) {
  EXPECT_EQ(iri_fragment("http://x.org/onto#A"), "A");
  EXPECT_EQ(iri_fragment("http://x.org/onto/Meta_Review"), "Meta_Review");
  EXPECT_EQ(iri_fragment("http://x.org/onto/B/"), "B");
  EXPECT_EQ(iri_fragment("plain"), "plain");
}

TEST(ParseOntology, OwlThingIsNotAConcept) {
  const auto o = parse_ontology(doc(R"(
  <owl:Class rdf:about="#A"><rdfs:subClassOf rdf:resource="http://www.w3.org/2002/07/owl#Thing"/></owl:Class>)"));
  EXPECT_EQ(o.concept_count(), 1U);
  EXPECT_TRUE(o.subclass_edges().empty());
}

TEST(ParseOntology, AnonymousSuperclassesAreIgnored) {
  const auto o = parse_ontology(doc(R"(
  <owl:Class rdf:about="#A">
    <rdfs:subClassOf>
      <owl:Restriction>
        <owl:onProperty rdf:resource="#p"/>
        <owl:someValuesFrom rdf:resource="#B"/>
      </owl:Restriction>
    </rdfs:subClassOf>
    <rdfs:subClassOf><owl:Class rdf:about="#C"/></rdfs:subClassOf>
  </owl:Class>)"));
  // C is named inline; the restriction and its filler are not edges
  ASSERT_EQ(o.concept_count(), 2U);
  EXPECT_EQ(o.subclass_edges().size(), 1U);
  EXPECT_EQ(o.concept_iri(o.subclass_edges()[0].second), "http://x.org/onto#C");
}

TEST(ParseOntology, RdfIdAndTypedDescriptions) {
  const auto o = parse_ontology(doc(R"(
  <owl:Class rdf:ID="A"/>
  <rdf:Description rdf:about="#B">
    <rdf:type rdf:resource="http://www.w3.org/2002/07/owl#Class"/>
    <rdfs:subClassOf rdf:resource="#A"/>
  </rdf:Description>)"));
  EXPECT_EQ(o.concept_count(), 2U);
  EXPECT_TRUE(o.find_concept("http://x.org/onto#A"));
  EXPECT_EQ(o.subclass_edges().size(), 1U);
}

TEST(ParseOntology, UndeclaredEdgeEndpointsBecomeConcepts) {
  const auto o = parse_ontology(doc(R"(<owl:Class rdf:about="#A"><rdfs:subClassOf rdf:resource="#Z"/></owl:Class>)"));
  EXPECT_EQ(o.concept_count(), 2U);
  EXPECT_EQ(o.labels()[1], "Z");
}

TEST(ParseOntology, MalformedXmlReportsOffset) {
  const std::string bad = doc(R"(<owl:Class rdf:about="#A"></owl:Clas>)");
  try {
    parse_ontology(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.offset(), 0U);
    EXPECT_LE(e.offset(), bad.size());
  }
  EXPECT_THROW(parse_ontology(""), ParseError);
}

TEST(ParseOntology, ToyFixture) {
  const auto o = parse_ontology(read_file(testing::data_dir() / "toy.owl"));
  EXPECT_EQ(o.iri(), "http://example.org/toy");
  EXPECT_EQ(o.concept_count(), 20U);
  EXPECT_EQ(o.properties().size(), 7U);
  EXPECT_EQ(entity_label(o, *o.find_concept("http://example.org/toy#ProgramCommitteeMember")),
            "Program Committee Member");
  // Student's owl:Thing superclass is dropped, its Attendee superclass kept
  const auto student = *o.find_concept("http://example.org/toy#Student");
  ASSERT_EQ(o.parents(student).size(), 1U);
  EXPECT_EQ(o.labels()[o.parents(student)[0].value], "Attendee");
}

TEST(ParseOntology, ParsingTwiceGivesEqualOntologies) {
  const auto text = read_file(testing::data_dir() / "toy.owl");
  EXPECT_EQ(parse_ontology(text), parse_ontology(text));
}

}  // namespace
}  // namespace ontoalign
