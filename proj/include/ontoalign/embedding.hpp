#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ontoalign {

using Vec = Eigen::VectorXd;

/// Splits on whitespace, '_', '-' and camelCase boundaries, lowercasing ASCII.
std::vector<std::string> tokenize(std::string_view label);

/// Lookup key: the tokens of `label` joined by single spaces.
std::string normalize_label(std::string_view label);

/// Signed feature hashing of character trigrams ("<tok>" padded), averaged
/// over tokens and L2-normalized. Returns the zero vector for no tokens.
Vec hash_embed(const std::vector<std::string>& tokens, std::size_t dim, std::uint64_t seed);

struct EmbeddingFallback {
  enum class Kind { Fail, HashEmbed };
  Kind kind = Kind::Fail;
  std::uint64_t seed = 0;
};

/// Frozen label embeddings keyed by normalized label.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim, EmbeddingFallback fallback = {});

  std::size_t dim() const { return dim_; }
  const EmbeddingFallback& fallback() const { return fallback_; }
  void set_fallback(EmbeddingFallback fallback) { fallback_ = fallback; }
  std::size_t size() const { return vectors_.size(); }
  const std::map<std::string, Vec>& vectors() const { return vectors_; }

  /// Stores `v` under the normalized form of `label`. Throws on a length or
  /// finiteness violation.
  void insert(std::string_view label, Vec v);
  bool contains(std::string_view label) const;

  /// Throws MissingEmbeddingError on a miss when the fallback is Fail.
  Vec lookup(std::string_view label) const;

  bool operator==(const EmbeddingStore& other) const;

 private:
  std::size_t dim_;
  EmbeddingFallback fallback_;
  std::map<std::string, Vec> vectors_;
};

/// Text format: first line `dim=<N>`, then `<normalized label>\t<v1> ... <vN>`.
EmbeddingStore load_store(const std::filesystem::path& file, EmbeddingFallback fallback = {});
EmbeddingStore read_store(std::istream& in, EmbeddingFallback fallback = {});
void save_store(const EmbeddingStore& store, const std::filesystem::path& file);
void write_store(const EmbeddingStore& store, std::ostream& out);

}  // namespace ontoalign
