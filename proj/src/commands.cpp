#include "ontoalign/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "ontoalign/alignment.hpp"
#include "ontoalign/checkpoint.hpp"
#include "ontoalign/dataset_loader.hpp"
#include "ontoalign/error.hpp"
#include "ontoalign/eval.hpp"
#include "ontoalign/run_config.hpp"

namespace fs = std::filesystem;

namespace ontoalign {

namespace {

// A missing or unusable input named on the command line; exits with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string embeddings;
  bool fallback_hash = false;
  bool ablation = false;
  std::string source, target, reference, dataset_dir, checkpoint, report, output, concept_name;
};

void add_common(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_file, "Configuration file of `key = value` lines");
  cmd->add_option("--set", o.overrides, "Override a configuration key (key=value); repeatable");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_option("--embeddings", o.embeddings, "Embedding file (dim=<N> text format)");
  cmd->add_flag("--fallback-hash-embed", o.fallback_hash, "Hash-embed labels missing from the embedding file");
  cmd->add_option("--source", o.source, "Source ontology (RDF/XML)");
  cmd->add_option("--target", o.target, "Target ontology (RDF/XML)");
}

RunConfig resolve(const CliOptions& o) {
  RunConfig cfg;
  if (!o.config_file.empty()) cfg.load_file(o.config_file);
  for (const auto& kv : o.overrides) cfg.load_text(kv, "--set");
  auto apply = [&](const char* key, const std::string& value) {
    if (!value.empty()) cfg.set(key, value);
  };
  apply("source", o.source);
  apply("target", o.target);
  apply("reference", o.reference);
  apply("dataset_dir", o.dataset_dir);
  apply("checkpoint", o.checkpoint);
  apply("report", o.report);
  apply("output", o.output);
  apply("concept", o.concept_name);
  apply("embeddings", o.embeddings);
  if (o.seed) cfg.set("seed", std::to_string(*o.seed));
  if (o.fallback_hash) cfg.set("fallback", "hash");
  if (o.threshold) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", *o.threshold);
    cfg.set("threshold_concept", buf);
    cfg.set("threshold_property", buf);
  }
  return cfg;
}

void require_file(const RunConfig& cfg, const char* key) {
  const std::string& path = cfg.get(key);
  if (path.empty()) throw UsageError(std::string("missing required setting '") + key + "'");
  if (!fs::exists(path)) throw UsageError(std::string(key) + " not found: " + path);
}

void check_optional_file(const RunConfig& cfg, const char* key) {
  const std::string& path = cfg.get(key);
  if (!path.empty() && !fs::exists(path)) throw UsageError(std::string(key) + " not found: " + path);
}

std::vector<PairTask> load_tasks(const RunConfig& cfg) {
  if (cfg.is_set("dataset_dir")) {
    require_file(cfg, "dataset_dir");
    auto tasks = load_dataset_dir(cfg.get("dataset_dir"));
    if (tasks.empty()) throw UsageError("no <a>-<b>.rdf reference files with matching ontologies under " + cfg.get("dataset_dir"));
    return tasks;
  }
  require_file(cfg, "source");
  require_file(cfg, "target");
  require_file(cfg, "reference");
  std::vector<PairTask> tasks;
  tasks.push_back(load_pair_task(cfg.get("source"), cfg.get("target"), cfg.get("reference")));
  return tasks;
}

EmbeddingStore make_store(const RunConfig& cfg, std::size_t dim) {
  check_optional_file(cfg, "embeddings");
  if (!cfg.is_set("embeddings")) return EmbeddingStore(dim, cfg.fallback());
  EmbeddingStore store = load_store(cfg.get("embeddings"), cfg.fallback());
  if (store.dim() != dim) {
    throw ConfigError("embedding file has dim " + std::to_string(store.dim()) + " but the model expects " +
                      std::to_string(dim));
  }
  return store;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

void print_config(const RunConfig& cfg, std::ostream& err) {
  err << "# resolved configuration\n";
  for (const auto& [k, v] : cfg.resolved()) err << "#   " << k << " = " << v << '\n';
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ExperimentConfig exp = cfg.experiment();
  if (!cfg.is_set("checkpoint")) throw UsageError("missing required setting 'checkpoint'");
  const auto tasks = load_tasks(cfg);
  const EmbeddingStore store = make_store(cfg, exp.model.dim);

  std::map<const Ontology*, OntologyFeatures> features;
  auto feature = [&](const Ontology* o) -> const OntologyFeatures& {
    auto it = features.find(o);
    if (it == features.end()) it = features.emplace(o, encode_ontology(*o, store, exp.context, exp.model)).first;
    return it->second;
  };
  std::vector<PairRef> examples;
  for (const auto& task : tasks) {
    const auto& s = feature(task.source.get());
    const auto& t = feature(task.target.get());
    for (const auto& p : task.dataset.concept_pairs) {
      examples.push_back({&s.concepts[p.source.value], &t.concepts[p.target.value], static_cast<double>(p.label)});
    }
  }

  TrainResult result = train(ModelParams::initialize(exp.model, exp.train.seed), examples, exp.train);

  // Thresholds are chosen on the training pairs themselves.
  std::vector<double> scores;
  batch_loss(result.params, examples, nullptr, &scores);
  std::vector<int> labels;
  for (const auto& e : examples) labels.push_back(static_cast<int>(e.label));
  const ThresholdChoice concept_theta = select_threshold(scores, labels);

  std::vector<double> property_scores;
  std::vector<int> property_labels;
  for (const auto& task : tasks) {
    const auto& s = feature(task.source.get());
    const auto& t = feature(task.target.get());
    for (const auto& p : task.dataset.property_pairs) {
      property_scores.push_back(similarity(s.properties[p.source.value], t.properties[p.target.value]));
      property_labels.push_back(p.label);
    }
  }
  const ThresholdChoice property_theta = select_threshold(property_scores, property_labels);
  for (const auto* c : {&concept_theta, &property_theta}) {
    if (!c->warning.empty()) err << "warning: " << c->warning << '\n';
  }

  save_checkpoint({result.params, concept_theta.theta, property_theta.theta}, cfg.get("checkpoint"));
  std::string log = "epoch\tloss\n";
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu\t%.17g\n", e + 1, result.epoch_loss[e]);
    log += buf;
  }
  const std::string log_path = cfg.is_set("loss_log") ? cfg.get("loss_log") : cfg.get("checkpoint") + ".loss.tsv";
  write_text(log_path, log);

  out << "trained on " << examples.size() << " concept pairs from " << tasks.size() << " ontology pair(s)\n";
  if (!result.epoch_loss.empty()) {
    out << "loss: first epoch " << result.epoch_loss.front() << ", last epoch " << result.epoch_loss.back() << '\n';
  }
  out << "threshold_concept = " << concept_theta.theta << ", threshold_property = " << property_theta.theta << '\n';
  out << "checkpoint written to " << cfg.get("checkpoint") << '\n';
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, bool ablation, std::ostream& out, std::ostream& err) {
  const ExperimentConfig exp = cfg.experiment();
  const auto tasks = load_tasks(cfg);
  const EmbeddingStore store = make_store(cfg, exp.model.dim);
  for (const auto& t : tasks) {
    if (t.dataset.unmatched_cells > 0) {
      err << "warning: " << t.name << ": " << t.dataset.unmatched_cells
          << " reference cell(s) name entities missing from the parsed ontologies\n";
    }
  }
  const auto units = experiment_units(tasks, exp.granularity);
  const FoldPlan plan = plan_folds(units, exp.k, exp.granularity, exp.train.seed);

  auto report_warnings = [&](const std::string& mode, const ExperimentReport& r) {
    for (const auto& f : r.folds) {
      for (const auto& w : f.warnings) err << "warning: " << mode << "fold " << f.fold << ": " << w << '\n';
    }
  };

  std::string json;
  if (ablation) {
    const auto runs = ablation_sweep(tasks, store, exp, plan);
    for (const auto& [mode, r] : runs) report_warnings(mode + " ", r);
    out << ablation_table(runs);
    json = ablation_json(runs, cfg.resolved());
  } else {
    ExperimentReport report = run_experiment(tasks, store, exp, plan);
    report.config = cfg.resolved();
    report_warnings("", report);
    out << report_table(report);
    json = report_json(report);
  }
  if (cfg.is_set("report")) {
    write_text(cfg.get("report"), json);
    out << "report written to " << cfg.get("report") << '\n';
  }
  return kExitOk;
}

int cmd_align(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg, "source");
  require_file(cfg, "target");
  require_file(cfg, "checkpoint");
  Checkpoint ck;
  try {
    ck = load_checkpoint(cfg.get("checkpoint"));
  } catch (const std::exception& e) {
    throw UsageError(std::string("unreadable checkpoint: ") + e.what());
  }
  ExperimentConfig exp = cfg.experiment();
  exp.context.max_depth = ck.params.config.max_depth;
  const EmbeddingStore store = make_store(cfg, ck.params.config.dim);

  const Ontology source = parse_ontology(read_file(cfg.get("source")));
  const Ontology target = parse_ontology(read_file(cfg.get("target")));
  const double theta_c = cfg.is_set("threshold_concept") ? cfg.get_real("threshold_concept")
                                                         : ck.threshold_concept.value_or(0.5);
  const double theta_p = cfg.is_set("threshold_property") ? cfg.get_real("threshold_property")
                                                          : ck.threshold_property.value_or(0.5);

  const OntologyFeatures sf = encode_ontology(source, store, exp.context, ck.params.config);
  const OntologyFeatures tf = encode_ontology(target, store, exp.context, ck.params.config);
  auto outputs = [&](const OntologyFeatures& f) {
    std::vector<const ContextEncoding*> ptrs;
    for (const auto& e : f.concepts) ptrs.push_back(&e);
    return represent_all(ck.params, ptrs);
  };
  const Mat so = outputs(sf);
  const Mat to = outputs(tf);

  ReferenceAlignment result;
  result.source_ontology = source.iri();
  result.target_ontology = target.iri();
  for (std::uint32_t s = 0; s < source.concept_count(); ++s) {
    for (std::uint32_t t = 0; t < target.concept_count(); ++t) {
      const double h = similarity(so.col(s), to.col(t));
      if (h > theta_c) result.cells.push_back({source.concept_iri(ConceptId{s}), target.concept_iri(ConceptId{t}), "=", h});
    }
  }
  for (const auto& sp : source.properties()) {
    for (const auto& tp : target.properties()) {
      if (sp.kind != tp.kind) continue;
      const double h = similarity(sf.properties[sp.id.value], tf.properties[tp.id.value]);
      if (h > theta_p) result.cells.push_back({sp.iri, tp.iri, "=", h});
    }
  }

  const std::string xml = write_alignment(result);
  if (cfg.is_set("output")) {
    write_text(cfg.get("output"), xml);
    out << result.cells.size() << " cell(s) written to " << cfg.get("output") << '\n';
  } else {
    out << xml;
  }
  return kExitOk;
}

int cmd_inspect(const RunConfig& cfg, std::ostream& out) {
  require_file(cfg, "source");
  if (!cfg.is_set("concept")) throw UsageError("missing required setting 'concept'");
  const ExperimentConfig exp = cfg.experiment();
  const Ontology o = parse_ontology(read_file(cfg.get("source")));
  const std::string& wanted = cfg.get("concept");

  std::optional<ConceptId> id = o.find_concept(wanted);
  for (std::uint32_t i = 0; !id && i < o.concept_count(); ++i) {
    const ConceptId c{i};
    if (o.labels()[i] == wanted || iri_fragment(o.concept_iri(c)) == wanted) id = c;
  }
  if (!id) throw UsageError("concept not found: " + wanted);

  const ContextBundle b = build_context(o, *id, exp.context);
  auto name = [&](ConceptId c) { return o.concept_iri(c) + " (" + o.labels()[c.value] + ")"; };
  out << "concept: " << name(*id) << '\n';
  out << "lineage_paths: " << b.lineage_paths.size() << '\n';
  for (const auto& path : b.lineage_paths) {
    out << "  -";
    for (ConceptId c : path) out << ' ' << o.labels()[c.value] << " >";
    out << " |\n";
  }
  out << "children: " << b.children.size() << '\n';
  for (ConceptId c : b.children) out << "  " << name(c) << '\n';
  out << "obj_neighbors: " << b.obj_neighbors.size() << '\n';
  for (ConceptId c : b.obj_neighbors) out << "  " << name(c) << '\n';
  out << "data_neighbors: " << b.data_neighbors.size() << '\n';
  for (PropertyId p : b.data_neighbors) out << "  " << o.property(p).iri << " (" << o.property(p).label << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ontology alignment with a dual-attention Siamese model", "ontoalign"};
  app.require_subcommand(1);

  CliOptions opts;
  auto* train_cmd = app.add_subcommand("train", "Train on labeled ontology pairs and write a checkpoint");
  auto* eval_cmd = app.add_subcommand("evaluate", "Run the K-fold evaluation protocol and write a report");
  auto* align_cmd = app.add_subcommand("align", "Align two ontologies with a trained checkpoint");
  auto* inspect_cmd = app.add_subcommand("inspect-context", "Print the context bundle of one concept");
  for (auto* cmd : {train_cmd, eval_cmd, align_cmd, inspect_cmd}) add_common(cmd, opts);
  for (auto* cmd : {train_cmd, eval_cmd}) {
    cmd->add_option("--reference", opts.reference, "Reference alignment (OAEI format)");
    cmd->add_option("--dataset-dir", opts.dataset_dir, "Directory of <a>.owl ontologies and <a>-<b>.rdf references");
  }
  for (auto* cmd : {train_cmd, align_cmd}) cmd->add_option("--checkpoint", opts.checkpoint, "Checkpoint file");
  eval_cmd->add_flag("--ablation", opts.ablation, "Run the ablation sweep (3 modes + 4 single facets)");
  eval_cmd->add_option("--report", opts.report, "Report output file (JSON)");
  align_cmd->add_option("--threshold", opts.threshold, "Decision threshold for concepts and properties");
  align_cmd->add_option("--output", opts.output, "Alignment output file (default: stdout)");
  inspect_cmd->add_option("--concept", opts.concept_name, "Concept IRI, label or IRI fragment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    const RunConfig cfg = resolve(opts);
    cfg.experiment();  // validate every value before doing any work
    print_config(cfg, err);
    if (train_cmd->parsed()) return cmd_train(cfg, out, err);
    if (eval_cmd->parsed()) return cmd_evaluate(cfg, opts.ablation, out, err);
    if (align_cmd->parsed()) return cmd_align(cfg, out);
    return cmd_inspect(cfg, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingEmbeddingError& e) {
    err << "error: " << e.what() << " (pass --fallback-hash-embed or add it to the embedding file)\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ontoalign
