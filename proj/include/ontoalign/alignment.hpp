#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ontoalign {

struct AlignmentCell {
  std::string source_entity;
  std::string target_entity;
  std::string relation = "=";
  double measure = 1.0;

  bool operator==(const AlignmentCell&) const = default;
};

/// Cells of an OAEI Alignment document. Only "=" cells count as ground truth.
struct ReferenceAlignment {
  std::string source_ontology;
  std::string target_ontology;
  std::vector<AlignmentCell> cells;
  std::size_t skipped_cells = 0;  // cells missing entity1 or entity2

  std::vector<const AlignmentCell*> equivalences() const;
};

ReferenceAlignment parse_reference_alignment(std::string_view document);

/// Serializes cells in the OAEI Alignment format (level 0, "**" type).
std::string write_alignment(const ReferenceAlignment& alignment);

}  // namespace ontoalign
