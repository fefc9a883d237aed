#include "ontoalign/embedding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ontoalign/error.hpp"

namespace ontoalign {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_separator(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == '_' ||
         c == '-';
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t hash_bytes(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix64(seed + 0x9e3779b97f4a7c15ULL);
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view label) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < label.size(); ++i) {
    const char c = label[i];
    if (is_separator(c)) {
      flush();
      continue;
    }
    if (is_upper(c) && i > 0) {
      const char prev = label[i - 1];
      const bool next_lower = i + 1 < label.size() && is_lower(label[i + 1]);
      if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) flush();
    }
    current += is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  flush();
  return tokens;
}

std::string normalize_label(std::string_view label) {
  std::string key;
  for (const auto& t : tokenize(label)) {
    if (!key.empty()) key += ' ';
    key += t;
  }
  return key;
}

Vec hash_embed(const std::vector<std::string>& tokens, std::size_t dim, std::uint64_t seed) {
  Vec out = Vec::Zero(static_cast<Eigen::Index>(dim));
  if (tokens.empty() || dim == 0) return out;
  for (const auto& token : tokens) {
    const std::string padded = "<" + token + ">";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      const std::uint64_t h = hash_bytes(std::string_view(padded).substr(i, 3), seed);
      const auto bucket = static_cast<Eigen::Index>(h % dim);
      out[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
  }
  out /= static_cast<double>(tokens.size());
  const double norm = out.norm();
  if (norm > 0.0) out /= norm;
  return out;
}

EmbeddingStore::EmbeddingStore(std::size_t dim, EmbeddingFallback fallback)
    : dim_(dim), fallback_(fallback) {
  if (dim == 0) throw FormatError("embedding dimension must be positive");
}

void EmbeddingStore::insert(std::string_view label, Vec v) {
  if (static_cast<std::size_t>(v.size()) != dim_) {
    throw FormatError("embedding for '" + std::string(label) + "' has " + std::to_string(v.size()) +
                      " values, expected " + std::to_string(dim_));
  }
  if (!v.allFinite()) throw FormatError("embedding for '" + std::string(label) + "' is not finite");
  vectors_.insert_or_assign(normalize_label(label), std::move(v));
}

bool EmbeddingStore::contains(std::string_view label) const {
  return vectors_.contains(normalize_label(label));
}

Vec EmbeddingStore::lookup(std::string_view label) const {
  const std::string key = normalize_label(label);
  if (const auto it = vectors_.find(key); it != vectors_.end()) return it->second;
  if (fallback_.kind == EmbeddingFallback::Kind::HashEmbed) {
    return hash_embed(tokenize(label), dim_, fallback_.seed);
  }
  throw MissingEmbeddingError(normalize_label(label));
}

bool EmbeddingStore::operator==(const EmbeddingStore& other) const {
  if (dim_ != other.dim_ || vectors_.size() != other.vectors_.size()) return false;
  auto it = other.vectors_.begin();
  for (const auto& [key, v] : vectors_) {
    if (key != it->first || v != it->second) return false;
    ++it;
  }
  return true;
}

EmbeddingStore read_store(std::istream& in, EmbeddingFallback fallback) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("dim=")) {
    throw FormatError("embedding file must start with 'dim=<N>'");
  }
  std::size_t dim = 0;
  {
    const char* first = line.data() + 4;
    const char* last = line.data() + line.size();
    while (last > first && (last[-1] == '\r' || last[-1] == ' ')) --last;
    const auto [ptr, ec] = std::from_chars(first, last, dim);
    if (ec != std::errc() || ptr != last || dim == 0) {
      throw FormatError("invalid embedding header '" + line + "'");
    }
  }
  EmbeddingStore store(dim, fallback);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": missing tab after label");
    }
    Vec v(static_cast<Eigen::Index>(dim));
    std::size_t count = 0;
    const char* p = line.data() + tab + 1;
    const char* end = line.data() + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0.0;
      const auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) {
        throw FormatError("line " + std::to_string(line_no) + ": invalid number");
      }
      if (count < dim) v[static_cast<Eigen::Index>(count)] = x;
      ++count;
      p = next;
    }
    if (count != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                        " values, found " + std::to_string(count));
    }
    store.insert(std::string_view(line).substr(0, tab), std::move(v));
  }
  return store;
}

EmbeddingStore load_store(const std::filesystem::path& file, EmbeddingFallback fallback) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open embedding file " + file.string());
  return read_store(in, fallback);
}

void write_store(const EmbeddingStore& store, std::ostream& out) {
  std::string line;
  out << "dim=" << store.dim() << '\n';
  for (const auto& [key, v] : store.vectors()) {
    line = key;
    line += '\t';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i > 0) line += ' ';
      append_number(line, v[i]);
    }
    line += '\n';
    out << line;
  }
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write embedding file " + file.string());
  write_store(store, out);
}

}  // namespace ontoalign
