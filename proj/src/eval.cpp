#include "ontoalign/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ontoalign/checkpoint.hpp"
#include "ontoalign/error.hpp"
#include "ontoalign/random.hpp"

namespace ontoalign {

namespace {

// Contiguous block bounds over n items, earlier blocks taking the remainder.
std::vector<std::pair<std::size_t, std::size_t>> blocks(std::size_t n, std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t size = n / k + (i < n % k ? 1 : 0);
    out.emplace_back(begin, begin + size);
    begin += size;
  }
  return out;
}

struct Unit {
  std::size_t task;
  bool property;
  std::size_t index;
  int label;
};

std::vector<Unit> flatten_units(std::span<const PairTask> tasks) {
  std::vector<Unit> units;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& ds = tasks[t].dataset;
    for (std::size_t i = 0; i < ds.concept_pairs.size(); ++i) {
      units.push_back({t, false, i, ds.concept_pairs[i].label});
    }
    for (std::size_t i = 0; i < ds.property_pairs.size(); ++i) {
      units.push_back({t, true, i, ds.property_pairs[i].label});
    }
  }
  return units;
}

// Every labeled pair covered by a set of plan units.
std::vector<Unit> expand(std::span<const std::size_t> plan_units, Granularity g,
                         std::span<const PairTask> tasks, const std::vector<Unit>& flat) {
  std::vector<Unit> out;
  if (g == Granularity::ConceptPair) {
    for (std::size_t u : plan_units) out.push_back(flat[u]);
    return out;
  }
  for (std::size_t t : plan_units) {
    const auto& ds = tasks[t].dataset;
    for (std::size_t i = 0; i < ds.concept_pairs.size(); ++i) out.push_back({t, false, i, ds.concept_pairs[i].label});
    for (std::size_t i = 0; i < ds.property_pairs.size(); ++i) out.push_back({t, true, i, ds.property_pairs[i].label});
  }
  return out;
}

class FeatureCache {
 public:
  FeatureCache(const EmbeddingStore& store, const ContextConfig& context, const ModelConfig& model)
      : store_(store), context_(context), model_(model) {}

  const OntologyFeatures& get(const Ontology* o) {
    auto it = cache_.find(o);
    if (it == cache_.end()) it = cache_.emplace(o, encode_ontology(*o, store_, context_, model_)).first;
    return it->second;
  }

 private:
  const EmbeddingStore& store_;
  const ContextConfig& context_;
  const ModelConfig& model_;
  std::map<const Ontology*, OntologyFeatures> cache_;
};

// Scores labeled pairs with fixed parameters; concept representations are
// computed once per ontology.
class Scorer {
 public:
  Scorer(const ModelParams& params, std::span<const PairTask> tasks, FeatureCache& features)
      : params_(params), tasks_(tasks), features_(features) {}

  double score(const Unit& u) {
    const auto& task = tasks_[u.task];
    if (u.property) {
      const auto& p = task.dataset.property_pairs[u.index];
      return similarity(features_.get(task.source.get()).properties[p.source.value],
                        features_.get(task.target.get()).properties[p.target.value]);
    }
    const auto& c = task.dataset.concept_pairs[u.index];
    const Mat& s = outputs(task.source.get());
    const Mat& t = outputs(task.target.get());
    return similarity(s.col(c.source.value), t.col(c.target.value));
  }

 private:
  const Mat& outputs(const Ontology* o) {
    auto it = outputs_.find(o);
    if (it == outputs_.end()) {
      const auto& concepts = features_.get(o).concepts;
      std::vector<const ContextEncoding*> ptrs;
      ptrs.reserve(concepts.size());
      for (const auto& e : concepts) ptrs.push_back(&e);
      it = outputs_.emplace(o, represent_all(params_, ptrs)).first;
    }
    return it->second;
  }

  const ModelParams& params_;
  std::span<const PairTask> tasks_;
  FeatureCache& features_;
  std::map<const Ontology*, Mat> outputs_;
};

FoldResult run_fold(std::size_t fold_index, const Fold& fold, std::span<const PairTask> tasks,
                    const std::vector<Unit>& flat, FeatureCache& features, const ExperimentConfig& cfg,
                    Granularity granularity, std::vector<ScoredPair>& predictions) {
  FoldResult result;
  result.fold = fold_index;

  std::vector<PairRef> examples;
  for (const Unit& u : expand(fold.train, granularity, tasks, flat)) {
    if (u.property) continue;  // properties carry no trainable path
    const auto& task = tasks[u.task];
    const auto& pair = task.dataset.concept_pairs[u.index];
    examples.push_back({&features.get(task.source.get()).concepts[pair.source.value],
                        &features.get(task.target.get()).concepts[pair.target.value],
                        static_cast<double>(pair.label)});
  }

  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = cfg.train.seed + fold_index;
  TrainResult trained = train(ModelParams::initialize(cfg.model, train_cfg.seed), examples, train_cfg);
  result.epoch_loss = std::move(trained.epoch_loss);

  Scorer scorer(trained.params, tasks, features);
  std::vector<double> concept_scores, property_scores;
  std::vector<int> concept_labels, property_labels;
  for (const Unit& u : expand(fold.validation, granularity, tasks, flat)) {
    (u.property ? property_scores : concept_scores).push_back(scorer.score(u));
    (u.property ? property_labels : concept_labels).push_back(u.label);
  }
  const ThresholdChoice concept_theta = select_threshold(concept_scores, concept_labels);
  const ThresholdChoice property_theta = select_threshold(property_scores, property_labels);
  result.theta_concept = concept_theta.theta;
  result.theta_property = property_theta.theta;
  if (!concept_theta.warning.empty()) result.warnings.push_back("concept: " + concept_theta.warning);
  if (!property_theta.warning.empty()) result.warnings.push_back("property: " + property_theta.warning);

  Confusion counts;
  for (const Unit& u : expand(fold.test, granularity, tasks, flat)) {
    const double s = scorer.score(u);
    const int predicted = s > (u.property ? result.theta_property : result.theta_concept) ? 1 : 0;
    counts.tp += predicted == 1 && u.label == 1;
    counts.fp += predicted == 1 && u.label == 0;
    counts.fn += predicted == 0 && u.label == 1;
    predictions.push_back({u.task, u.property, u.index, s, predicted, u.label});
  }
  result.metrics = metrics_from_counts(counts);
  return result;
}

nlohmann::ordered_json record(const nlohmann::ordered_json& fold, const nlohmann::ordered_json& theta_c,
                              const nlohmann::ordered_json& theta_p, const Metrics& m) {
  nlohmann::ordered_json r;
  r["fold"] = fold;
  r["theta_concept"] = theta_c;
  r["theta_property"] = theta_p;
  r["tp"] = m.counts.tp;
  r["fp"] = m.counts.fp;
  r["fn"] = m.counts.fn;
  r["precision"] = m.precision;
  r["recall"] = m.recall;
  r["f1"] = m.f1;
  return r;
}

nlohmann::ordered_json records(const ExperimentReport& report) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& f : report.folds) out.push_back(record(f.fold, f.theta_concept, f.theta_property, f.metrics));
  out.push_back(record("micro", nullptr, nullptr, report.micro));
  out.push_back(record("macro", nullptr, nullptr, report.macro));
  return out;
}

nlohmann::ordered_json config_json(const std::vector<std::pair<std::string, std::string>>& config) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) out[k] = v;
  return out;
}

std::string format_row(const std::string& name, const std::string& theta_c, const std::string& theta_p,
                       const Metrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %8s %8s %6zu %6zu %6zu %9.4f %9.4f %9.4f\n", name.c_str(),
                theta_c.c_str(), theta_p.c_str(), m.counts.tp, m.counts.fp, m.counts.fn, m.precision,
                m.recall, m.f1);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string table_header(const char* first) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %8s %8s %6s %6s %6s %9s %9s %9s\n", first, "theta_c", "theta_p",
                "tp", "fp", "fn", "precision", "recall", "f1");
  return buf;
}

}  // namespace

std::string_view to_string(Granularity g) {
  return g == Granularity::ConceptPair ? "concept_pair" : "ontology_pair";
}

Granularity parse_granularity(std::string_view s) {
  if (s == "ontology_pair") return Granularity::OntologyPair;
  if (s == "concept_pair") return Granularity::ConceptPair;
  throw ConfigError("unknown granularity '" + std::string(s) + "' (ontology_pair|concept_pair)");
}

FoldPlan plan_folds(std::span<const int> unit_labels, std::size_t k, Granularity granularity,
                    std::uint64_t seed) {
  const std::size_t n = unit_labels.size();
  if (k < 2) throw std::invalid_argument("k must be at least 2 for a sliding-window plan");
  if (k > n) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds the " + std::to_string(n) +
                                " available units");
  }
  FoldPlan plan;
  plan.granularity = granularity;
  plan.k = k;

  if (granularity == Granularity::OntologyPair) {
    const auto bounds = blocks(n, k);
    for (std::size_t i = 0; i < k; ++i) {
      Fold fold;
      const auto [begin, end] = bounds[i];
      const std::size_t held = end - begin;
      const std::size_t test_count = (held + 2) / 3;
      for (std::size_t u = 0; u < n; ++u) {
        if (u < begin || u >= end) {
          fold.train.push_back(u);
        } else if (u < end - test_count) {
          fold.validation.push_back(u);
        } else {
          fold.test.push_back(u);
        }
      }
      plan.folds.push_back(std::move(fold));
    }
    return plan;
  }

  std::vector<std::size_t> positives, negatives;
  for (std::size_t u = 0; u < n; ++u) (unit_labels[u] == 1 ? positives : negatives).push_back(u);
  Rng rng(seed);
  rng.shuffle(positives);
  rng.shuffle(negatives);
  const auto pos_bounds = blocks(positives.size(), k);
  const auto neg_bounds = blocks(negatives.size(), k);

  for (std::size_t i = 0; i < k; ++i) {
    Fold fold;
    const std::size_t val_block = (i + 1) % k;
    auto assign = [&](const std::vector<std::size_t>& units, const auto& bounds, std::size_t val_take) {
      for (std::size_t b = 0; b < k; ++b) {
        const auto [begin, end] = bounds[b];
        for (std::size_t j = begin; j < end; ++j) {
          if (b == i) {
            fold.test.push_back(units[j]);
          } else if (b == val_block && j < begin + val_take) {
            fold.validation.push_back(units[j]);
          } else {
            fold.train.push_back(units[j]);
          }
        }
      }
    };
    const auto pos_val = pos_bounds[val_block];
    const auto neg_val = neg_bounds[val_block];
    assign(positives, pos_bounds, (pos_val.second - pos_val.first + 1) / 2);
    assign(negatives, neg_bounds, (neg_val.second - neg_val.first) / 2);
    for (auto* v : {&fold.train, &fold.validation, &fold.test}) std::sort(v->begin(), v->end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

std::vector<int> experiment_units(std::span<const PairTask> tasks, Granularity granularity) {
  if (granularity == Granularity::OntologyPair) return std::vector<int>(tasks.size(), 0);
  std::vector<int> labels;
  for (const auto& u : flatten_units(tasks)) labels.push_back(u.label);
  return labels;
}

ExperimentReport run_experiment(std::span<const PairTask> tasks, const EmbeddingStore& store,
                                const ExperimentConfig& cfg, const FoldPlan& plan) {
  const std::vector<Unit> flat =
      plan.granularity == Granularity::ConceptPair ? flatten_units(tasks) : std::vector<Unit>{};
  FeatureCache features(store, cfg.context, cfg.model);

  ExperimentReport report;
  Confusion pooled;
  for (std::size_t i = 0; i < plan.folds.size(); ++i) {
    auto& predictions = report.test_predictions.emplace_back();
    try {
      report.folds.push_back(run_fold(i, plan.folds[i], tasks, flat, features, cfg, plan.granularity, predictions));
    } catch (const MissingEmbeddingError&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(i) + " failed: " + e.what());
    }
    pooled += report.folds.back().metrics.counts;
  }
  report.micro = metrics_from_counts(pooled);
  report.macro.counts = pooled;
  if (!report.folds.empty()) {
    for (const auto& f : report.folds) {
      report.macro.precision += f.metrics.precision;
      report.macro.recall += f.metrics.recall;
      report.macro.f1 += f.metrics.f1;
    }
    const auto n = static_cast<double>(report.folds.size());
    report.macro.precision /= n;
    report.macro.recall /= n;
    report.macro.f1 /= n;
  }
  return report;
}

std::vector<std::pair<std::string, ExperimentReport>> ablation_sweep(std::span<const PairTask> tasks,
                                                                     const EmbeddingStore& store,
                                                                     const ExperimentConfig& cfg,
                                                                     const FoldPlan& plan) {
  struct Mode {
    const char* name;
    Ablation ablation;
    unsigned facets;
  };
  const Mode modes[] = {
      {"no_context", Ablation::NoContext, kAllFacets},
      {"single_attention", Ablation::SingleAttention, kAllFacets},
      {"full", Ablation::Full, kAllFacets},
      {"parents", Ablation::Full, 1U << kAncestors},
      {"children", Ablation::Full, 1U << kChildren},
      {"object_properties", Ablation::Full, 1U << kObjectNeighbors},
      {"data_properties", Ablation::Full, 1U << kDatatypeNeighbors},
  };
  std::vector<std::pair<std::string, ExperimentReport>> out;
  for (const auto& mode : modes) {
    ExperimentConfig run = cfg;
    run.model.ablation = mode.ablation;
    run.model.facets = mode.facets;
    out.emplace_back(mode.name, run_experiment(tasks, store, run, plan));
  }
  return out;
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["config"] = config_json(report.config);
  j["records"] = records(report);
  return j.dump(2) + "\n";
}

std::string ablation_json(const std::vector<std::pair<std::string, ExperimentReport>>& runs,
                          const std::vector<std::pair<std::string, std::string>>& config) {
  nlohmann::ordered_json j;
  j["config"] = config_json(config);
  auto summary = nlohmann::ordered_json::array();
  auto details = nlohmann::ordered_json::array();
  for (const auto& [mode, report] : runs) {
    auto row = record("micro", nullptr, nullptr, report.micro);
    nlohmann::ordered_json keyed;
    keyed["mode"] = mode;
    keyed.update(row);
    summary.push_back(keyed);
    nlohmann::ordered_json d;
    d["mode"] = mode;
    d["records"] = records(report);
    details.push_back(d);
  }
  j["summary"] = summary;
  j["runs"] = details;
  return j.dump(2) + "\n";
}

std::string report_table(const ExperimentReport& report) {
  std::string out = table_header("fold");
  for (const auto& f : report.folds) {
    out += format_row(std::to_string(f.fold), fixed2(f.theta_concept), fixed2(f.theta_property), f.metrics);
  }
  out += format_row("micro", "-", "-", report.micro);
  out += format_row("macro", "-", "-", report.macro);
  return out;
}

std::string ablation_table(const std::vector<std::pair<std::string, ExperimentReport>>& runs) {
  std::string out = table_header("mode (micro)");
  for (const auto& [mode, report] : runs) out += format_row(mode, "-", "-", report.micro);
  return out;
}

}  // namespace ontoalign
