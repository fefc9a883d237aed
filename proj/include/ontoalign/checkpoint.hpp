#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "ontoalign/model.hpp"

namespace ontoalign {

/// Trained parameters plus the decision thresholds chosen for them.
struct Checkpoint {
  ModelParams params;
  std::optional<double> threshold_concept;
  std::optional<double> threshold_property;

  bool operator==(const Checkpoint&) const = default;
};

// Text layout, one item per line:
//
//   ontoalign-checkpoint 1
//   dim <N>
//   out_dim <M>
//   max_depth <D>
//   pooling weighted_sum|max_pool
//   ablation full|single_attention|no_context
//   facets <4-char mask, ancestors object children datatype, e.g. 1111>
//   threshold_concept <real>|none
//   threshold_property <real>|none
//   W
//   <M lines, row-major, 2N space-separated reals each>
//   theta
//   <D space-separated reals>
//   category_logits
//   <4 space-separated reals>
//
// Reals use the shortest round-trip decimal form, so save/load is exact.
void write_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

std::string_view to_string(Pooling p);
std::string_view to_string(Ablation a);
Pooling parse_pooling(std::string_view s);
Ablation parse_ablation(std::string_view s);
std::string facets_to_string(unsigned facets);
unsigned parse_facets(std::string_view s);

}  // namespace ontoalign
