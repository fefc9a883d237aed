#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ontoalign/model.hpp"
#include "ontoalign/ontology.hpp"
#include "ontoalign/random.hpp"

namespace ontoalign::testing {

inline std::filesystem::path data_dir() { return ONTOALIGN_TEST_DATA; }

inline std::string iri(const std::string& name) { return "http://t.org/o#" + name; }

/// Ontology over concepts named c0..c{n-1} with (child, parent) index edges.
inline Ontology make_ontology(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  OntologyDraft d;
  d.iri = "http://t.org/o";
  // zero padding keeps IRI order equal to index order
  auto name = [](std::size_t i) {
    std::string s = std::to_string(i);
    return "c" + std::string(3 - s.size(), '0') + s;
  };
  for (std::size_t i = 0; i < n; ++i) d.classes.push_back(iri(name(i)));
  for (auto [c, p] : edges) d.subclass_of.emplace_back(iri(name(c)), iri(name(p)));
  return Ontology::from_draft(d);
}

inline Vec random_vec(Rng& rng, std::size_t dim, double scale = 1.0) {
  Vec v(static_cast<Eigen::Index>(dim));
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

/// 2-3 lineage paths of length 1-3 and 0-2 neighbors per one-hop facet.
inline ConceptInput random_input(Rng& rng, std::size_t dim) {
  ConceptInput in;
  in.focal = random_vec(rng, dim);
  const auto paths = 2 + rng.below(2);
  for (std::size_t j = 0; j < paths; ++j) {
    std::vector<Vec> path;
    const auto len = 1 + rng.below(3);
    for (std::size_t k = 0; k < len; ++k) path.push_back(random_vec(rng, dim));
    in.lineage.push_back(std::move(path));
  }
  for (auto* facet : {&in.children, &in.obj, &in.data}) {
    const auto n = rng.below(3);
    for (std::size_t j = 0; j < n; ++j) facet->push_back(random_vec(rng, dim));
  }
  return in;
}

/// Parameters with every trainable entry perturbed away from its initial value.
inline ModelParams random_params(const ModelConfig& config, Rng& rng) {
  ModelParams p = ModelParams::initialize(config, rng.next());
  for (auto& t : p.theta) t = rng.uniform(0.5, 1.5);
  for (auto& l : p.category_logits) l = rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace ontoalign::testing
