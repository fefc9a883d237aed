#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ontoalign/eval.hpp"

namespace ontoalign {

std::string read_file(const std::filesystem::path& file);

/// Parses one source/target/reference triple into a task.
PairTask load_pair_task(const std::filesystem::path& source, const std::filesystem::path& target,
                        const std::filesystem::path& reference);

/// Collects tasks from a directory tree: every `<a>-<b>.rdf` reference file
/// becomes a task over `<a>.owl` and `<b>.owl` found anywhere under `root`
/// (names compared case-insensitively). Tasks are ordered by file name and
/// share parsed ontologies.
std::vector<PairTask> load_dataset_dir(const std::filesystem::path& root);

}  // namespace ontoalign
