#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontoalign/embedding.hpp"
#include "ontoalign/eval.hpp"

namespace ontoalign {

/// Flat `key = value` configuration. Every key has a default; unknown keys and
/// malformed values raise ConfigError. Later assignments win.
class RunConfig {
 public:
  RunConfig();

  /// Reads `key = value` lines; '#' starts a comment, blank lines are ignored.
  void load_file(const std::filesystem::path& file);
  void load_text(std::string_view text, std::string_view origin = "<text>");
  void set(std::string_view key, std::string_view value);

  const std::string& get(std::string_view key) const;
  bool is_set(std::string_view key) const { return !get(key).empty(); }
  double get_real(std::string_view key) const;
  std::size_t get_count(std::string_view key) const;
  bool get_flag(std::string_view key) const;

  /// Every key with its effective value, in declaration order.
  const std::vector<std::pair<std::string, std::string>>& resolved() const { return entries_; }
  std::string dump() const;

  ExperimentConfig experiment() const;
  EmbeddingFallback fallback() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace ontoalign
