#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ontoalign/context.hpp"
#include "ontoalign/embedding.hpp"
#include "ontoalign/metrics.hpp"
#include "ontoalign/model.hpp"
#include "ontoalign/train.hpp"

namespace ontoalign {

enum class Granularity { OntologyPair, ConceptPair };

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct FoldPlan {
  Granularity granularity = Granularity::OntologyPair;
  std::size_t k = 0;
  std::vector<Fold> folds;
};

/// Sliding-window K-fold plan over units 0..n-1 (n = unit_labels.size()).
///
/// OntologyPair: units keep their order and are cut into k contiguous blocks,
/// earlier blocks taking the remainder. Fold i holds out block i; its last
/// ceil(b/3) units are the test set and the rest validate (2 + 1 for blocks
/// of three). Test sets are disjoint but cover only the held-out tails.
///
/// ConceptPair: positives and negatives are shuffled separately with `seed`
/// and dealt into k blocks. Fold i tests on block i, validates on half of
/// block i+1 (mod k) and trains on the rest, giving 70/10/20 for k = 5. Test
/// sets partition all units.
///
/// Throws std::invalid_argument when k < 2 or k > n.
FoldPlan plan_folds(std::span<const int> unit_labels, std::size_t k, Granularity granularity,
                    std::uint64_t seed);

/// One source/target ontology pair with its labeled candidate pairs.
struct PairTask {
  std::string name;
  std::shared_ptr<const Ontology> source;
  std::shared_ptr<const Ontology> target;
  AlignmentDataset dataset;
};

struct ExperimentConfig {
  ModelConfig model;
  ContextConfig context;
  TrainConfig train;
  Granularity granularity = Granularity::OntologyPair;
  std::size_t k = 7;
};

struct FoldResult {
  std::size_t fold = 0;
  double theta_concept = 0.5;
  double theta_property = 0.5;
  Metrics metrics;
  std::vector<double> epoch_loss;
  std::vector<std::string> warnings;
};

/// Predictions of one fold on its test units.
struct ScoredPair {
  std::size_t task = 0;
  bool property = false;
  std::size_t index = 0;  // into concept_pairs or property_pairs
  double score = 0.0;
  int predicted = 0;
  int label = 0;
};

struct ExperimentReport {
  std::vector<FoldResult> folds;
  Metrics micro;  // pooled confusion counts
  Metrics macro;  // mean of per-fold precision, recall, F1; counts pooled
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::vector<ScoredPair>> test_predictions;  // per fold
};

/// Units for plan_folds: one per task (OntologyPair) or one per labeled
/// concept/property pair across all tasks (ConceptPair).
std::vector<int> experiment_units(std::span<const PairTask> tasks, Granularity granularity);

/// Trains, thresholds and tests every fold of `plan`. Fold i seeds parameter
/// initialization and training with train.seed + i. Errors are rethrown as
/// std::runtime_error naming the fold.
ExperimentReport run_experiment(std::span<const PairTask> tasks, const EmbeddingStore& store,
                                const ExperimentConfig& cfg, const FoldPlan& plan);

/// No-context, single-attention and full runs followed by the four
/// single-facet runs (parents, children, object properties, data
/// properties), keyed by mode name in that order.
std::vector<std::pair<std::string, ExperimentReport>> ablation_sweep(
    std::span<const PairTask> tasks, const EmbeddingStore& store, const ExperimentConfig& cfg,
    const FoldPlan& plan);

/// Machine-readable report: one record per fold then "micro" and "macro"
/// records, fields fold, theta_concept, theta_property, tp, fp, fn,
/// precision, recall, f1.
std::string report_json(const ExperimentReport& report);
std::string ablation_json(const std::vector<std::pair<std::string, ExperimentReport>>& runs,
                          const std::vector<std::pair<std::string, std::string>>& config);
std::string report_table(const ExperimentReport& report);
std::string ablation_table(const std::vector<std::pair<std::string, ExperimentReport>>& runs);

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view s);

}  // namespace ontoalign
