#include "ontoalign/train.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ontoalign/adam.hpp"
#include "ontoalign/error.hpp"
#include "ontoalign/metrics.hpp"

namespace ontoalign {

std::size_t AlignmentDataset::positive_count() const {
  std::size_t n = 0;
  for (const auto& p : concept_pairs) n += p.label == 1;
  for (const auto& p : property_pairs) n += p.label == 1;
  return n;
}

AlignmentDataset build_dataset(const Ontology& source, const Ontology& target,
                               const ReferenceAlignment& reference) {
  AlignmentDataset ds;
  ds.source_iri = source.iri();
  ds.target_iri = target.iri();

  std::set<std::pair<std::uint32_t, std::uint32_t>> concept_hits;
  std::set<std::pair<std::uint32_t, std::uint32_t>> property_hits;
  for (const AlignmentCell* cell : reference.equivalences()) {
    auto match = [&](const std::string& s_iri, const std::string& t_iri) {
      const auto sc = source.find_concept(s_iri);
      const auto tc = target.find_concept(t_iri);
      if (sc && tc) {
        concept_hits.emplace(sc->value, tc->value);
        return true;
      }
      const auto sp = source.find_property(s_iri);
      const auto tp = target.find_property(t_iri);
      if (sp && tp && source.property(*sp).kind == target.property(*tp).kind) {
        property_hits.emplace(sp->value, tp->value);
        return true;
      }
      return false;
    };
    // Cells are normally written source-first; accept the swapped orientation.
    if (!match(cell->source_entity, cell->target_entity) &&
        !match(cell->target_entity, cell->source_entity)) {
      ++ds.unmatched_cells;
    }
  }

  ds.concept_pairs.reserve(source.concept_count() * target.concept_count());
  for (std::uint32_t s = 0; s < source.concept_count(); ++s) {
    for (std::uint32_t t = 0; t < target.concept_count(); ++t) {
      ds.concept_pairs.push_back({ConceptId{s}, ConceptId{t}, concept_hits.contains({s, t}) ? 1 : 0});
    }
  }
  for (const auto& sp : source.properties()) {
    for (const auto& tp : target.properties()) {
      if (sp.kind != tp.kind) continue;
      ds.property_pairs.push_back(
          {sp.id, tp.id, property_hits.contains({sp.id.value, tp.id.value}) ? 1 : 0});
    }
  }
  return ds;
}

ConceptInput gather_input(const Ontology& o, ConceptId c, const ContextBundle& bundle,
                          const EmbeddingStore& store) {
  ConceptInput in;
  in.focal = store.lookup(entity_label(o, c));
  for (const auto& path : bundle.lineage_paths) {
    auto& nodes = in.lineage.emplace_back();
    for (ConceptId n : path) nodes.push_back(store.lookup(entity_label(o, n)));
  }
  for (ConceptId n : bundle.children) in.children.push_back(store.lookup(entity_label(o, n)));
  for (ConceptId n : bundle.obj_neighbors) in.obj.push_back(store.lookup(entity_label(o, n)));
  for (PropertyId p : bundle.data_neighbors) in.data.push_back(store.lookup(entity_label(o, p)));
  return in;
}

OntologyFeatures encode_ontology(const Ontology& o, const EmbeddingStore& store,
                                 const ContextConfig& context, const ModelConfig& model) {
  if (store.dim() != model.dim) {
    throw ShapeError("embedding dimension " + std::to_string(store.dim()) + " does not match model dim " +
                     std::to_string(model.dim));
  }
  OntologyFeatures features;
  features.concepts.reserve(o.concept_count());
  for (std::uint32_t i = 0; i < o.concept_count(); ++i) {
    const ConceptId c{i};
    const ContextBundle bundle = build_context(o, c, context);
    features.concepts.push_back(encode_context(model, gather_input(o, c, bundle, store)));
  }
  for (const auto& p : o.properties()) features.properties.push_back(property_forward(store.lookup(p.label)));
  return features;
}

TrainResult train(ModelParams params, std::span<const PairRef> examples, const TrainConfig& cfg) {
  if (examples.empty()) throw TrainingError("training set is empty");
  if (cfg.batch_size == 0) throw TrainingError("batch_size must be positive");

  Adam adam(params, {cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps});
  Gradients grads = Gradients::zeros_like(params);
  Rng rng(cfg.seed);
  const std::vector<PairRef> base(examples.begin(), examples.end());

  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<PairRef> order = base;
    if (cfg.oversample) {
      order = oversample_positives(base, rng);
    } else {
      rng.shuffle(order);
    }
    double total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      grads.set_zero();
      const double batch = batch_loss(params, std::span(order).subspan(start, n), &grads);
      if (!std::isfinite(batch) || !grads.W.allFinite() || !grads.theta.allFinite() ||
          !grads.category_logits.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", batch " << batch_index;
        throw TrainingError(msg.str());
      }
      total += batch * static_cast<double>(n);
      adam.step(params, grads);
    }
    result.epoch_loss.push_back(total / static_cast<double>(order.size()));
  }
  result.params = std::move(params);
  return result;
}

ThresholdChoice select_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
  ThresholdChoice best;
  std::size_t positives = 0;
  for (int l : labels) positives += l == 1;
  if (positives == 0) {
    best.theta = 0.5;
    best.warning = "validation set has no positive pairs; using threshold 0.5";
    return best;
  }
  best.f1 = -1.0;
  for (int step = 0; step <= 100; ++step) {
    const double theta = step / 100.0;
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool predicted = scores[i] > theta;
      const bool actual = labels[i] == 1;
      c.tp += predicted && actual;
      c.fp += predicted && !actual;
      c.fn += !predicted && actual;
    }
    const double f1 = metrics_from_counts(c).f1;
    if (f1 > best.f1) {
      best.f1 = f1;
      best.theta = theta;
    }
  }
  if (best.theta == 0.0 && std::all_of(scores.begin(), scores.end(), [](double s) { return s > 0.0; })) {
    best.warning = "threshold 0.00 selected; every validation pair is predicted positive";
  }
  return best;
}

std::vector<int> predict(double theta, std::span<const double> scores) {
  std::vector<int> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s > theta ? 1 : 0);
  return out;
}

}  // namespace ontoalign
