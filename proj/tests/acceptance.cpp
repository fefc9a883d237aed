// Acceptance checks: one PASS/FAIL/SKIP line per criterion, exit 1 on any FAIL.
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ontoalign/commands.hpp"
#include "ontoalign/context.hpp"
#include "ontoalign/dataset_loader.hpp"
#include "ontoalign/eval.hpp"
#include "ontoalign/model.hpp"
#include "ontoalign/train.hpp"
#include "support.hpp"

using namespace ontoalign;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// gradients

double pair_loss(const ModelParams& p, const ConceptInput& s, const ConceptInput& t, double label) {
  const double h = similarity(concept_forward(p, s).output, concept_forward(p, t).output);
  return (h - label) * (h - label);
}

template <typename Get>
Eigen::VectorXd central_differences(ModelParams& p, Eigen::Index n, Get slot, const ConceptInput& s,
                                    const ConceptInput& t, double label) {
  const double h = 1e-4;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double& x = slot(p, i);
    const double keep = x;
    x = keep + h;
    const double up = pair_loss(p, s, t, label);
    x = keep - h;
    const double down = pair_loss(p, s, t, label);
    x = keep;
    out[i] = (up - down) / (2 * h);
  }
  return out;
}

// the floor keeps exactly-zero gradients from turning roundoff into error 1
double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& n) {
  return (a - n).norm() / std::max({a.norm(), n.norm(), 1e-6});
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  Rng rng(1);
  double worst = 0.0;
  int instances = 0;
  for (auto pooling : {Pooling::WeightedSum, Pooling::MaxPool}) {
    ModelConfig cfg;
    cfg.dim = 8;
    cfg.out_dim = 8;
    cfg.max_depth = 3;
    cfg.pooling = pooling;
    for (int trial = 0; trial < 15; ++trial, ++instances) {
      ModelParams p = testing::random_params(cfg, rng);
      const auto s = testing::random_input(rng, cfg.dim);
      const auto t = testing::random_input(rng, cfg.dim);
      const double label = trial % 2;
      const auto g = backward(concept_forward(p, s), concept_forward(p, t), label, p);
      const auto nw = central_differences(
          p, p.W.size(), [](ModelParams& q, Eigen::Index i) -> double& { return q.W.data()[i]; }, s, t, label);
      const auto nt = central_differences(
          p, p.theta.size(), [](ModelParams& q, Eigen::Index i) -> double& { return q.theta[i]; }, s, t, label);
      const auto nl = central_differences(
          p, 4, [](ModelParams& q, Eigen::Index i) -> double& { return q.category_logits[i]; }, s, t, label);
      worst = std::max({worst, rel_error(Eigen::Map<const Eigen::VectorXd>(g.W.data(), g.W.size()), nw),
                        rel_error(g.theta, nt), rel_error(g.category_logits, nl)});
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-4 && secs < 10.0;
  return {ok ? Outcome::Pass : Outcome::Fail, std::to_string(instances) + " instances, max relative error " +
                                                  fmt("%.2e", worst) + ", " + fmt("%.2f", secs) + " s"};
}

// attention

Outcome attention_normalization() {
  Rng rng(2);
  double worst = 0.0;
  std::size_t masked = 0;
  bool masked_exact = true;
  for (int trial = 0; trial < 1000; ++trial) {
    ModelConfig cfg;
    cfg.dim = 8;
    cfg.max_depth = 6;
    cfg.pooling = trial % 2 ? Pooling::MaxPool : Pooling::WeightedSum;
    const auto in = testing::random_input(rng, cfg.dim);
    const auto e = encode_context(cfg, in);
    auto sum = [](const std::vector<double>& w) {
      double s = 0.0;
      for (double x : w) s += x;
      return s;
    };
    worst = std::max(worst, std::abs(sum(e.path_weights) - 1.0));
    worst = std::max(worst, std::abs(sum(e.node_weights) - 1.0));
    for (std::size_t k = e.unified.size(); k < e.node_weights.size(); ++k) {
      ++masked;
      masked_exact &= e.node_weights[k] == 0.0;
    }
    for (const auto& w : e.neighbor_weights) {
      if (!w.empty()) worst = std::max(worst, std::abs(sum(w) - 1.0));
    }
    Eigen::Vector4d logits;
    for (auto& l : logits) l = rng.uniform(-3.0, 3.0);
    const unsigned enabled = 1 + static_cast<unsigned>(rng.below(15));
    const auto fw = facet_weights(logits, enabled);
    worst = std::max(worst, std::abs(fw.sum() - 1.0));
    for (unsigned f = 0; f < 4; ++f) {
      if (!((enabled >> f) & 1U)) {
        ++masked;
        masked_exact &= fw[f] == 0.0;
      }
    }
  }
  const bool ok = worst <= 1e-6 && masked_exact;
  return {ok ? Outcome::Pass : Outcome::Fail, "max |sum - 1| " + fmt("%.2e", worst) + ", " + std::to_string(masked) +
                                                  " masked entries " + (masked_exact ? "all exactly 0" : "NOT all 0")};
}

Outcome siamese_symmetry() {
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    ModelConfig cfg;
    cfg.dim = 16;
    cfg.out_dim = 12;
    const ModelParams p = testing::random_params(cfg, rng);
    const auto a = testing::random_input(rng, cfg.dim);
    const auto b = testing::random_input(rng, cfg.dim);
    const auto fa = concept_forward(p, a);
    const auto fb = concept_forward(p, b);
    worst = std::max(worst, std::abs(similarity(fa.output, fb.output) - similarity(fb.output, fa.output)));
    const auto ea = encode_context(cfg, a);
    const auto eb = encode_context(cfg, b);
    std::vector<double> ab, ba;
    const PairRef fwd{&ea, &eb, 1.0};
    const PairRef rev{&eb, &ea, 1.0};
    batch_loss(p, std::span(&fwd, 1), nullptr, &ab);
    batch_loss(p, std::span(&rev, 1), nullptr, &ba);
    worst = std::max(worst, std::abs(ab[0] - ba[0]));
  }
  return {worst <= 1e-9 ? Outcome::Pass : Outcome::Fail, "1000 pairs, max |H(a,b) - H(b,a)| " + fmt("%.2e", worst)};
}

// lineage paths

std::vector<LineagePath> brute_force_paths(const Ontology& o, ConceptId c, std::size_t max_depth,
                                           std::size_t max_paths) {
  std::vector<LineagePath> frontier{{}};
  std::vector<LineagePath> maximal;
  while (!frontier.empty()) {
    std::vector<LineagePath> next;
    for (const auto& p : frontier) {
      const ConceptId tip = p.empty() ? c : p.back();
      bool grew = false;
      for (ConceptId parent : o.parents(tip)) {
        if (parent == c || std::find(p.begin(), p.end(), parent) != p.end()) continue;
        auto q = p;
        q.push_back(parent);
        next.push_back(std::move(q));
        grew = true;
      }
      if (!grew && !p.empty()) maximal.push_back(p);
    }
    frontier = std::move(next);
  }
  std::set<LineagePath> unique;
  for (auto p : maximal) {
    if (p.size() > max_depth) p.resize(max_depth);
    unique.insert(p);
  }
  std::vector<LineagePath> out(unique.begin(), unique.end());
  if (out.size() > max_paths) out.resize(max_paths);
  return out;
}

Outcome path_oracle() {
  Rng rng(4);
  int dag_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(19);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t child = 0; child < n; ++child) {
      for (std::size_t parent = child + 1; parent < n; ++parent) {
        if (rng.uniform01() < 0.2) edges.emplace_back(child, parent);
      }
    }
    const auto o = testing::make_ontology(n, edges);
    const std::size_t depth = 1 + rng.below(6);
    const std::size_t paths = 1 + rng.below(12);
    for (std::uint32_t c = 0; c < n; ++c) {
      if (enumerate_lineage_paths(o, ConceptId{c}, depth, paths) != brute_force_paths(o, ConceptId{c}, depth, paths)) {
        ++dag_mismatch;
      }
    }
  }
  int repeats = 0;
  std::size_t cyclic_paths = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(18);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t child = 0; child < n; ++child) {
      for (std::size_t parent = child + 1; parent < n; ++parent) {
        if (rng.uniform01() < 0.2) edges.emplace_back(child, parent);
      }
    }
    // back edges close cycles
    for (int b = 0; b < 3; ++b) {
      const std::size_t lo = rng.below(n - 1);
      const std::size_t hi = lo + 1 + rng.below(n - lo - 1);
      edges.emplace_back(hi, lo);
    }
    edges.emplace_back(n - 1, 0);
    edges.emplace_back(0, n - 1);
    const auto o = testing::make_ontology(n, edges);
    for (std::uint32_t c = 0; c < n; ++c) {
      for (const auto& p : enumerate_lineage_paths(o, ConceptId{c}, 6, 8)) {
        ++cyclic_paths;
        std::set<ConceptId> seen{ConceptId{c}};
        for (ConceptId x : p) repeats += !seen.insert(x).second;
      }
    }
  }
  const bool ok = dag_mismatch == 0 && repeats == 0;
  return {ok ? Outcome::Pass : Outcome::Fail, "200 DAGs: " + std::to_string(dag_mismatch) +
                                                  " mismatching concepts; 50 cyclic graphs: " +
                                                  std::to_string(cyclic_paths) + " paths, " + std::to_string(repeats) +
                                                  " repeated nodes"};
}

Outcome oversampling() {
  Rng rng(5);
  int bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t pos = 1 + rng.below(20);
    const std::size_t neg = pos + rng.below(200);
    std::vector<ConceptPair> pairs;
    for (std::uint32_t i = 0; i < pos + neg; ++i) pairs.push_back({ConceptId{i}, ConceptId{i}, i < pos ? 1 : 0});
    rng.shuffle(pairs);
    const auto out = oversample_positives(pairs, rng.next());
    std::map<std::uint32_t, std::size_t> count;
    std::size_t p = 0, n = 0;
    for (const auto& x : out) {
      (x.label ? p : n) += 1;
      ++count[x.source.value];
    }
    bool each = true;
    for (std::uint32_t i = 0; i < pos; ++i) each &= count[i] >= 1;
    bad += !(p == n && n == neg && each);
  }
  return {bad == 0 ? Outcome::Pass : Outcome::Fail, "500 trials, " + std::to_string(bad) + " violations"};
}

// end to end through the command line

struct CliRun {
  int code;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ontoalign");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CliRun evaluate_toy(const fs::path& report) {
  return cli({"evaluate", "--source", (testing::data_dir() / "toy.owl").string(), "--target",
              (testing::data_dir() / "toy_copy.owl").string(), "--reference",
              (testing::data_dir() / "toy-toy_copy.rdf").string(), "--fallback-hash-embed", "--seed", "0", "--set",
              "granularity=concept_pair", "--set", "folds=5", "--report", report.string()});
}

fs::path scratch_dir() {
  const auto d = fs::temp_directory_path() / "ontoalign_acceptance";
  fs::create_directories(d);
  return d;
}

Outcome end_to_end() {
  const auto report = scratch_dir() / "e2e.json";
  const auto t0 = Clock::now();
  const auto r = evaluate_toy(report);
  const double secs = seconds_since(t0);
  if (r.code != 0) return {Outcome::Fail, "evaluate exited with " + std::to_string(r.code) + ": " + r.err};
  const auto j = nlohmann::json::parse(slurp(report));
  double micro = -1.0, fold0 = -1.0;
  std::string per_fold;
  for (const auto& rec : j["records"]) {
    if (rec["fold"] == "micro") micro = rec["f1"];
    if (rec["fold"] == 0) fold0 = rec["f1"];
    if (rec["fold"].is_number()) per_fold += (per_fold.empty() ? "" : " ") + fmt("%.3f", rec["f1"].get<double>());
  }
  const bool ok = micro == 1.0 && secs < 60.0;
  return {ok ? Outcome::Pass : Outcome::Fail, "toy self-copy, 5 folds: micro F1 " + fmt("%.3f", micro) +
                                                  " (fold 0 " + fmt("%.3f", fold0) + "; per fold " + per_fold + "), " +
                                                  fmt("%.1f", secs) + " s"};
}

Outcome determinism() {
  // same command twice; the report records its own path, so it must match too
  const auto report = scratch_dir() / "det.json";
  const auto ra = evaluate_toy(report);
  const auto first = slurp(report);
  fs::remove(report);
  const auto rb = evaluate_toy(report);
  if (ra.code != 0 || rb.code != 0) return {Outcome::Fail, "evaluate failed: " + ra.err + rb.err};
  const bool same = !first.empty() && first == slurp(report);
  return {same ? Outcome::Pass : Outcome::Fail,
          same ? "two seed-0 reports identical (" + std::to_string(first.size()) + " bytes)" : "reports differ"};
}

// Five parents with distinct labels, each with three children whose labels
// repeat under every parent. Only the lineage tells the children apart.
Ontology ambiguous_ontology(const std::string& base) {
  OntologyDraft d;
  d.iri = base;
  for (const char* parent : {"zebra", "quokka", "axolotl", "narwhal", "pangolin"}) {
    const std::string p = base + "#" + parent;
    d.classes.push_back(p);
    for (const char* child : {"item", "record", "entry"}) {
      const std::string c = base + "#" + parent + "_" + child;
      d.classes.push_back(c);
      d.subclass_of.emplace_back(c, p);
      d.labels[c] = child;
    }
  }
  return Ontology::from_draft(d);
}

Outcome ablation_ordering() {
  const auto t0 = Clock::now();
  PairTask task;
  task.name = "ambiguous";
  task.source = std::make_shared<const Ontology>(ambiguous_ontology("http://s.org/amb"));
  task.target = std::make_shared<const Ontology>(ambiguous_ontology("http://t.org/amb"));
  ReferenceAlignment ref;
  for (std::uint32_t i = 0; i < task.source->concept_count(); ++i) {
    const auto& s = task.source->concept_iri(ConceptId{i});
    ref.cells.push_back({s, "http://t.org/amb" + s.substr(s.find('#')), "=", 1.0});
  }
  task.dataset = build_dataset(*task.source, *task.target, ref);
  const std::vector<PairTask> tasks{task};
  const EmbeddingStore store(512, {EmbeddingFallback::Kind::HashEmbed, 0});

  std::string detail;
  bool ok = task.dataset.positive_count() == 20;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    ExperimentConfig cfg;
    cfg.granularity = Granularity::ConceptPair;
    cfg.k = 5;
    cfg.train.seed = seed;
    const auto plan = plan_folds(experiment_units(tasks, cfg.granularity), cfg.k, cfg.granularity, seed);
    std::map<Ablation, double> f1;
    for (auto mode : {Ablation::NoContext, Ablation::Full}) {
      cfg.model.ablation = mode;
      f1[mode] = run_experiment(tasks, store, cfg, plan).micro.f1;
    }
    const double gap = f1[Ablation::Full] - f1[Ablation::NoContext];
    ok &= gap >= 0.1;
    detail += "seed " + std::to_string(seed) + ": full " + fmt("%.3f", f1[Ablation::Full]) + " vs no_context " +
              fmt("%.3f", f1[Ablation::NoContext]) + "; ";
  }
  return {ok ? Outcome::Pass : Outcome::Fail, detail + fmt("%.1f", seconds_since(t0)) + " s"};
}

Outcome dataset_counts() {
  fs::path root;
  if (const char* env = std::getenv("ONTOALIGN_CONFERENCE_DIR")) root = env;
  else root = fs::path(ONTOALIGN_TEST_DATA) / ".." / ".." / "data" / "conference";
  if (!fs::is_directory(root)) return {Outcome::Skip, "conference dataset not found at " + root.string()};

  const std::map<std::string, std::size_t> expected = {{"cmt", 29},   {"conference", 59}, {"confof", 38},
                                                       {"edas", 103}, {"ekaw", 73},       {"iasted", 140},
                                                       {"sigkdd", 49}};
  std::map<std::string, std::size_t> found;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.path().extension() != ".owl") continue;
    std::string stem = entry.path().stem().string();
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (expected.count(stem)) found[stem] = parse_ontology(read_file(entry.path())).concept_count();
  }
  bool ok = true;
  std::string detail;
  for (const auto& [name, n] : expected) {
    const auto it = found.find(name);
    const std::size_t got = it == found.end() ? 0 : it->second;
    ok &= got == n;
    detail += name + " " + std::to_string(got) + "/" + std::to_string(n) + ", ";
  }
  const auto tasks = load_dataset_dir(root);
  std::size_t positives = 0;
  for (const auto& t : tasks) positives += t.dataset.positive_count();
  ok &= tasks.size() == 21 && positives == 305;
  detail += std::to_string(tasks.size()) + " pairs, " + std::to_string(positives) + "/305 positives";
  return {ok ? Outcome::Pass : Outcome::Fail, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient_correctness", gradient_check},
      {"attention_normalization", attention_normalization},
      {"siamese_symmetry", siamese_symmetry},
      {"path_enumeration_oracle", path_oracle},
      {"oversampling", oversampling},
      {"end_to_end_separability", end_to_end},
      {"context_ablation_ordering", ablation_ordering},
      {"dataset_counts", dataset_counts},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
    failures += o.kind == Outcome::Fail;
    std::printf("%s %s: %s\n", tag, name, o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(fs::temp_directory_path() / "ontoalign_acceptance");
  return failures == 0 ? 0 : 1;
}
