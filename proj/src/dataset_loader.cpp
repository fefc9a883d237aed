#include "ontoalign/dataset_loader.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ontoalign/alignment.hpp"

namespace fs = std::filesystem;

namespace ontoalign {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

PairTask load_pair_task(const fs::path& source, const fs::path& target, const fs::path& reference) {
  PairTask task;
  task.name = source.stem().string() + "-" + target.stem().string();
  task.source = std::make_shared<const Ontology>(parse_ontology(read_file(source)));
  task.target = std::make_shared<const Ontology>(parse_ontology(read_file(target)));
  task.dataset = build_dataset(*task.source, *task.target, parse_reference_alignment(read_file(reference)));
  return task;
}

std::vector<PairTask> load_dataset_dir(const fs::path& root) {
  if (!fs::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::map<std::string, fs::path> ontologies;  // lowercased stem -> file
  std::map<std::string, fs::path> references;  // file name -> file
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = lower(entry.path().extension().string());
    if (ext == ".owl") ontologies.emplace(lower(entry.path().stem().string()), entry.path());
    if (ext == ".rdf") references.emplace(entry.path().filename().string(), entry.path());
  }

  std::map<std::string, std::shared_ptr<const Ontology>> parsed;
  auto ontology = [&](const std::string& key) {
    auto it = parsed.find(key);
    if (it == parsed.end()) {
      it = parsed.emplace(key, std::make_shared<const Ontology>(parse_ontology(read_file(ontologies.at(key))))).first;
    }
    return it->second;
  };

  std::vector<PairTask> tasks;
  for (const auto& [name, path] : references) {
    const std::string stem = lower(path.stem().string());
    for (std::size_t dash = stem.find('-'); dash != std::string::npos; dash = stem.find('-', dash + 1)) {
      const std::string a = stem.substr(0, dash);
      const std::string b = stem.substr(dash + 1);
      if (!ontologies.contains(a) || !ontologies.contains(b)) continue;
      PairTask task;
      task.name = path.stem().string();
      task.source = ontology(a);
      task.target = ontology(b);
      task.dataset = build_dataset(*task.source, *task.target, parse_reference_alignment(read_file(path)));
      tasks.push_back(std::move(task));
      break;
    }
  }
  return tasks;
}

}  // namespace ontoalign
