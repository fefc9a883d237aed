#include "ontoalign/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ontoalign/error.hpp"

namespace ontoalign {

namespace {

constexpr std::string_view kMagic = "ontoalign-checkpoint 1";

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

template <typename Range>
std::string join_numbers(const Range& values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ' ';
    first = false;
    append_number(line, v);
  }
  return line;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(std::string_view what) {
    std::string line;
    if (!std::getline(in_, line)) throw FormatError("checkpoint truncated: expected " + std::string(what));
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  std::string field(std::string_view key) {
    const std::string line = next(key);
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ' ') {
      fail("expected '" + std::string(key) + " <value>'");
    }
    return line.substr(key.size() + 1);
  }

  void expect(std::string_view exact) {
    if (next(exact) != exact) fail("expected '" + std::string(exact) + "'");
  }

  std::vector<double> numbers(std::size_t count, std::string_view what) {
    const std::string line = next(what);
    std::vector<double> out;
    out.reserve(count);
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double x = 0.0;
      const auto [next_p, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) fail("invalid number in " + std::string(what));
      out.push_back(x);
      p = next_p;
    }
    if (out.size() != count) {
      fail(std::string(what) + ": expected " + std::to_string(count) + " values, found " +
           std::to_string(out.size()));
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("checkpoint line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::size_t parse_count(const LineReader& reader, const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) reader.fail("invalid count '" + s + "'");
  return v;
}

std::optional<double> parse_threshold(const LineReader& reader, const std::string& s) {
  if (s == "none") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) reader.fail("invalid threshold '" + s + "'");
  return v;
}

std::string threshold_string(const std::optional<double>& t) {
  if (!t) return "none";
  std::string s;
  append_number(s, *t);
  return s;
}

}  // namespace

std::string_view to_string(Pooling p) { return p == Pooling::MaxPool ? "max_pool" : "weighted_sum"; }

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::SingleAttention: return "single_attention";
    case Ablation::NoContext: return "no_context";
    case Ablation::Full: break;
  }
  return "full";
}

Pooling parse_pooling(std::string_view s) {
  if (s == "weighted_sum") return Pooling::WeightedSum;
  if (s == "max_pool") return Pooling::MaxPool;
  throw ConfigError("unknown pooling '" + std::string(s) + "' (weighted_sum|max_pool)");
}

Ablation parse_ablation(std::string_view s) {
  if (s == "full") return Ablation::Full;
  if (s == "single_attention") return Ablation::SingleAttention;
  if (s == "no_context") return Ablation::NoContext;
  throw ConfigError("unknown ablation '" + std::string(s) + "' (full|single_attention|no_context)");
}

std::string facets_to_string(unsigned facets) {
  std::string s(kFacetCount, '0');
  for (unsigned c = 0; c < kFacetCount; ++c) {
    if ((facets >> c) & 1U) s[c] = '1';
  }
  return s;
}

unsigned parse_facets(std::string_view s) {
  if (s.size() != kFacetCount || s.find_first_not_of("01") != std::string_view::npos) {
    throw ConfigError("facet mask must be 4 characters of 0/1 (ancestors object children datatype)");
  }
  unsigned mask = 0;
  for (unsigned c = 0; c < kFacetCount; ++c) {
    if (s[c] == '1') mask |= 1U << c;
  }
  return mask;
}

void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  const auto& p = checkpoint.params;
  const auto& c = p.config;
  out << kMagic << '\n'
      << "dim " << c.dim << '\n'
      << "out_dim " << c.out_dim << '\n'
      << "max_depth " << c.max_depth << '\n'
      << "pooling " << to_string(c.pooling) << '\n'
      << "ablation " << to_string(c.ablation) << '\n'
      << "facets " << facets_to_string(c.facets) << '\n'
      << "threshold_concept " << threshold_string(checkpoint.threshold_concept) << '\n'
      << "threshold_property " << threshold_string(checkpoint.threshold_property) << '\n'
      << "W\n";
  std::vector<double> row(static_cast<std::size_t>(p.W.cols()));
  for (Eigen::Index r = 0; r < p.W.rows(); ++r) {
    for (Eigen::Index col = 0; col < p.W.cols(); ++col) row[static_cast<std::size_t>(col)] = p.W(r, col);
    out << join_numbers(row) << '\n';
  }
  out << "theta\n" << join_numbers(p.theta) << '\n';
  out << "category_logits\n" << join_numbers(p.category_logits) << '\n';
}

Checkpoint read_checkpoint(std::istream& in) {
  LineReader reader(in);
  reader.expect(kMagic);
  Checkpoint ck;
  auto& c = ck.params.config;
  try {
    c.dim = parse_count(reader, reader.field("dim"));
    c.out_dim = parse_count(reader, reader.field("out_dim"));
    c.max_depth = parse_count(reader, reader.field("max_depth"));
    c.pooling = parse_pooling(reader.field("pooling"));
    c.ablation = parse_ablation(reader.field("ablation"));
    c.facets = parse_facets(reader.field("facets"));
  } catch (const ConfigError& e) {
    reader.fail(e.what());
  }
  ck.threshold_concept = parse_threshold(reader, reader.field("threshold_concept"));
  ck.threshold_property = parse_threshold(reader, reader.field("threshold_property"));

  auto& p = ck.params;
  reader.expect("W");
  p.W.resize(static_cast<Eigen::Index>(c.out_dim), static_cast<Eigen::Index>(2 * c.dim));
  for (Eigen::Index r = 0; r < p.W.rows(); ++r) {
    const auto row = reader.numbers(2 * c.dim, "W row");
    for (Eigen::Index col = 0; col < p.W.cols(); ++col) p.W(r, col) = row[static_cast<std::size_t>(col)];
  }
  reader.expect("theta");
  const auto theta = reader.numbers(c.max_depth, "theta");
  p.theta = Eigen::Map<const Vec>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  reader.expect("category_logits");
  const auto logits = reader.numbers(kFacetCount, "category_logits");
  p.category_logits = Eigen::Map<const Eigen::Vector4d>(logits.data());
  if (!p.W.allFinite() || !p.theta.allFinite() || !p.category_logits.allFinite()) {
    throw FormatError("checkpoint contains non-finite parameters");
  }
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write checkpoint " + file.string());
  write_checkpoint(checkpoint, out);
  if (!out) throw std::runtime_error("failed writing checkpoint " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open checkpoint " + file.string());
  return read_checkpoint(in);
}

}  // namespace ontoalign
