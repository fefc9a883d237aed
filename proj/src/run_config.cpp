#include "ontoalign/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ontoalign/checkpoint.hpp"
#include "ontoalign/error.hpp"

namespace ontoalign {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig::RunConfig()
    : entries_{
          // inputs
          {"source", ""},
          {"target", ""},
          {"reference", ""},
          {"dataset_dir", ""},
          {"embeddings", ""},
          {"fallback", "fail"},
          {"hash_seed", "0"},
          // outputs
          {"checkpoint", ""},
          {"report", ""},
          {"loss_log", ""},
          {"output", ""},
          // context extraction
          {"max_depth", "6"},
          {"max_paths", "8"},
          {"max_neighbors", "16"},
          // model
          {"dim", "512"},
          {"out_dim", "300"},
          {"pooling", "weighted_sum"},
          {"ablation", "full"},
          {"facets", "1111"},
          // training
          {"learning_rate", "0.001"},
          {"epochs", "50"},
          {"batch_size", "32"},
          {"seed", "0"},
          {"adam_beta1", "0.9"},
          {"adam_beta2", "0.999"},
          {"adam_eps", "1e-8"},
          {"oversample", "true"},
          // evaluation
          {"granularity", "ontology_pair"},
          {"folds", "7"},
          // alignment
          {"threshold_concept", ""},
          {"threshold_property", ""},
          // inspection
          {"concept", ""},
      } {}

void RunConfig::set(std::string_view key, std::string_view value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::string(value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

const std::string& RunConfig::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void RunConfig::load_text(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  load_text(buf.str(), file.string());
}

double RunConfig::get_real(std::string_view key) const {
  const std::string& s = get(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a real number, got '" + s + "'");
  }
  return v;
}

std::size_t RunConfig::get_count(std::string_view key) const {
  const std::string& s = get(key);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool RunConfig::get_flag(std::string_view key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("'" + std::string(key) + "' expects true/false, got '" + s + "'");
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

EmbeddingFallback RunConfig::fallback() const {
  EmbeddingFallback f;
  const std::string& kind = get("fallback");
  if (kind == "hash") {
    f.kind = EmbeddingFallback::Kind::HashEmbed;
  } else if (kind != "fail") {
    throw ConfigError("'fallback' expects fail|hash, got '" + kind + "'");
  }
  f.seed = get_count("hash_seed");
  return f;
}

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig cfg;
  cfg.context.max_depth = get_count("max_depth");
  cfg.context.max_paths = get_count("max_paths");
  cfg.context.max_neighbors = get_count("max_neighbors");

  cfg.model.dim = get_count("dim");
  cfg.model.out_dim = get_count("out_dim");
  cfg.model.max_depth = cfg.context.max_depth;
  cfg.model.pooling = parse_pooling(get("pooling"));
  cfg.model.ablation = parse_ablation(get("ablation"));
  cfg.model.facets = parse_facets(get("facets"));
  if (cfg.model.dim == 0 || cfg.model.out_dim == 0 || cfg.model.max_depth == 0) {
    throw ConfigError("dim, out_dim and max_depth must be positive");
  }

  cfg.train.learning_rate = get_real("learning_rate");
  cfg.train.epochs = get_count("epochs");
  cfg.train.batch_size = get_count("batch_size");
  cfg.train.seed = get_count("seed");
  cfg.train.adam_beta1 = get_real("adam_beta1");
  cfg.train.adam_beta2 = get_real("adam_beta2");
  cfg.train.adam_eps = get_real("adam_eps");
  cfg.train.oversample = get_flag("oversample");
  if (cfg.train.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (cfg.train.learning_rate < 0.0 || cfg.train.adam_eps <= 0.0) {
    throw ConfigError("learning_rate must be >= 0 and adam_eps > 0");
  }

  cfg.granularity = parse_granularity(get("granularity"));
  cfg.k = get_count("folds");
  return cfg;
}

}  // namespace ontoalign
