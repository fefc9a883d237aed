#include "ontoalign/context.hpp"

#include <algorithm>

namespace ontoalign {

namespace {

template <typename T>
void truncate(std::vector<T>& v, std::size_t n) {
  if (v.size() > n) v.resize(n);
}

// Depth-first search visiting parents in id (= IRI) order, which emits the
// paths already sorted lexicographically. Cutting at max_depth inside the
// search is equivalent to truncating full paths and dropping duplicates.
struct LineageSearch {
  const Ontology& o;
  std::size_t max_depth;
  std::size_t max_paths;
  std::vector<char> on_path;
  LineagePath path;
  std::vector<LineagePath> out;

  void extend(ConceptId node) {
    if (out.size() >= max_paths) return;
    if (path.size() >= max_depth) {
      out.push_back(path);
      return;
    }
    bool extended = false;
    for (ConceptId parent : o.parents(node)) {
      if (on_path[parent.value]) continue;
      extended = true;
      on_path[parent.value] = 1;
      path.push_back(parent);
      extend(parent);
      path.pop_back();
      on_path[parent.value] = 0;
      if (out.size() >= max_paths) return;
    }
    if (!extended && !path.empty()) out.push_back(path);
  }
};

}  // namespace

std::vector<LineagePath> enumerate_lineage_paths(const Ontology& o, ConceptId c,
                                                 std::size_t max_depth, std::size_t max_paths) {
  if (max_depth == 0 || max_paths == 0) return {};
  LineageSearch search{o, max_depth, max_paths, std::vector<char>(o.concept_count(), 0), {}, {}};
  search.on_path[c.value] = 1;
  search.extend(c);
  return std::move(search.out);
}

std::vector<ConceptId> one_hop_children(const Ontology& o, ConceptId c) {
  std::vector<ConceptId> out;
  for (ConceptId child : o.children(c)) {
    if (child != c) out.push_back(child);
  }
  return out;
}

PropertyNeighbors property_neighbors(const Ontology& o, ConceptId c) {
  PropertyNeighbors out;
  auto contains = [](const std::vector<ConceptId>& v, ConceptId x) {
    return std::binary_search(v.begin(), v.end(), x);
  };
  for (const auto& p : o.properties()) {
    if (p.kind == PropertyKind::Object) {
      if (contains(p.domains, c)) out.obj.insert(out.obj.end(), p.ranges.begin(), p.ranges.end());
      if (contains(p.ranges, c)) out.obj.insert(out.obj.end(), p.domains.begin(), p.domains.end());
    } else if (contains(p.domains, c)) {
      out.data.push_back(p.id);
    }
  }
  std::sort(out.obj.begin(), out.obj.end());
  out.obj.erase(std::unique(out.obj.begin(), out.obj.end()), out.obj.end());
  std::erase(out.obj, c);
  return out;
}

ContextBundle build_context(const Ontology& o, ConceptId c, const ContextConfig& cfg) {
  ContextBundle bundle;
  bundle.lineage_paths = enumerate_lineage_paths(o, c, cfg.max_depth, cfg.max_paths);
  bundle.children = one_hop_children(o, c);
  auto neighbors = property_neighbors(o, c);
  bundle.obj_neighbors = std::move(neighbors.obj);
  bundle.data_neighbors = std::move(neighbors.data);
  truncate(bundle.children, cfg.max_neighbors);
  truncate(bundle.obj_neighbors, cfg.max_neighbors);
  truncate(bundle.data_neighbors, cfg.max_neighbors);
  return bundle;
}

}  // namespace ontoalign
