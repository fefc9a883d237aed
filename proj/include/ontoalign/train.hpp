#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontoalign/alignment.hpp"
#include "ontoalign/context.hpp"
#include "ontoalign/embedding.hpp"
#include "ontoalign/model.hpp"
#include "ontoalign/ontology.hpp"
#include "ontoalign/random.hpp"

namespace ontoalign {

template <typename Id>
struct LabeledPair {
  Id source;
  Id target;
  int label = 0;

  bool operator==(const LabeledPair&) const = default;
  auto operator<=>(const LabeledPair&) const = default;
};

using ConceptPair = LabeledPair<ConceptId>;
using PropertyPair = LabeledPair<PropertyId>;

/// Every candidate pair between two ontologies, labeled from the reference.
struct AlignmentDataset {
  std::vector<ConceptPair> concept_pairs;
  std::vector<PropertyPair> property_pairs;  // Object x Object and Datatype x Datatype
  std::string source_iri;
  std::string target_iri;
  std::size_t unmatched_cells = 0;  // "=" cells whose entities were not found as a same-kind pair

  std::size_t positive_count() const;
};

AlignmentDataset build_dataset(const Ontology& source, const Ontology& target,
                               const ReferenceAlignment& reference);

/// Duplicates positives until they match the negatives in number: each
/// positive floor(N/P) times plus N mod P distinct extras drawn from `rng`,
/// then shuffles the whole list. Lists with at least as many positives as
/// negatives are only shuffled. Throws std::invalid_argument without positives.
template <typename Pair>
std::vector<Pair> oversample_positives(const std::vector<Pair>& pairs, Rng& rng) {
  std::vector<Pair> positives;
  std::vector<Pair> out;
  for (const auto& p : pairs) {
    if (p.label == 1) positives.push_back(p);
    out.push_back(p);
  }
  if (positives.empty()) {
    throw std::invalid_argument("no positive pairs to oversample; disable oversampling");
  }
  const std::size_t negatives = pairs.size() - positives.size();
  if (negatives > positives.size()) {
    const std::size_t copies = negatives / positives.size();
    const std::size_t extras = negatives % positives.size();
    for (std::size_t c = 1; c < copies; ++c) out.insert(out.end(), positives.begin(), positives.end());
    // Partial Fisher-Yates: the first `extras` slots become a uniform sample.
    std::vector<std::size_t> order(positives.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < extras; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
      std::swap(order[i], order[j]);
      out.push_back(positives[order[i]]);
    }
  }
  rng.shuffle(out);
  return out;
}

template <typename Pair>
std::vector<Pair> oversample_positives(const std::vector<Pair>& pairs, std::uint64_t seed) {
  Rng rng(seed);
  return oversample_positives(pairs, rng);
}

/// Parameter-independent model inputs for every concept and property of one
/// ontology, indexed by id.
struct OntologyFeatures {
  std::vector<ContextEncoding> concepts;
  std::vector<Vec> properties;
};

/// Looks up the embeddings of a concept and of its context nodes.
ConceptInput gather_input(const Ontology& o, ConceptId c, const ContextBundle& bundle,
                          const EmbeddingStore& store);

OntologyFeatures encode_ontology(const Ontology& o, const EmbeddingStore& store,
                                 const ContextConfig& context, const ModelConfig& model);

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool oversample = true;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean squared error per epoch
};

/// Seeded mini-batch Adam on concept pairs. Each epoch re-draws the oversampled
/// list from one generator stream. Throws TrainingError on a non-finite loss.
TrainResult train(ModelParams params, std::span<const PairRef> examples, const TrainConfig& cfg);

struct ThresholdChoice {
  double theta = 0.5;
  double f1 = 0.0;
  std::string warning;  // non-empty when the choice is degenerate or a fallback
};

/// Grid search over {0.00, 0.01, ..., 1.00} for the F1-maximizing threshold
/// under `score > theta`; ties keep the smallest. No positives gives 0.5.
ThresholdChoice select_threshold(std::span<const double> scores, std::span<const int> labels);

/// 1 where score > theta, else 0.
std::vector<int> predict(double theta, std::span<const double> scores);

}  // namespace ontoalign
