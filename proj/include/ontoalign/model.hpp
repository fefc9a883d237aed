#pragma once

// Dual-attention Siamese scorer.
//
// A concept is represented as f(c) = W [u; v] where u is the frozen label
// embedding and v mixes four context facets:
//   ancestors  - path-level attention over lineage paths, a unified path, then
//                node-level attention scaled by positional weights theta
//   object / children / datatype neighbors - path-level attention over
//                length-one paths
// Facets mix through softmax(category_logits). Pairs are scored by cosine
// similarity and trained with squared error against {0, 1} labels.
//
// Everything up to the facet vectors depends only on embeddings, so it is
// computed once per concept (ContextEncoding); only theta, the facet weights
// and W are trainable.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ontoalign/embedding.hpp"

namespace ontoalign {

using Mat = Eigen::MatrixXd;

enum class Pooling { WeightedSum, MaxPool };
enum class Ablation { Full, SingleAttention, NoContext };

/// Facet order matches category_logits: ancestors, object, children, datatype.
enum Facet : unsigned { kAncestors = 0, kObjectNeighbors = 1, kChildren = 2, kDatatypeNeighbors = 3 };
inline constexpr std::size_t kFacetCount = 4;
inline constexpr unsigned kAllFacets = 0b1111;

struct ModelConfig {
  std::size_t dim = 512;
  std::size_t out_dim = 300;
  std::size_t max_depth = 6;
  Pooling pooling = Pooling::WeightedSum;
  Ablation ablation = Ablation::Full;
  unsigned facets = kAllFacets;  // bit i enables Facet i

  bool facet_enabled(Facet f) const { return (facets >> f) & 1U; }
  bool operator==(const ModelConfig&) const = default;
};

struct ModelParams {
  ModelConfig config;
  Mat W;                           // out_dim x 2*dim, no bias
  Vec theta;                       // max_depth, index 0 = nearest ancestor
  Eigen::Vector4d category_logits;

  /// W ~ U[-a, a] with a = sqrt(6 / (2*dim + out_dim)), theta = 1, logits = 0.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  bool operator==(const ModelParams& o) const {
    return config == o.config && W == o.W && theta == o.theta && category_logits == o.category_logits;
  }
};

/// Embeddings of a concept and of every node in its context bundle.
struct ConceptInput {
  Vec focal;
  std::vector<std::vector<Vec>> lineage;  // nearest ancestor first
  std::vector<Vec> children;
  std::vector<Vec> obj;
  std::vector<Vec> data;
};

// Attention primitives.

/// Dot product of the focal embedding with each node on one path.
std::vector<double> path_node_scores(const Vec& focal, std::span<const Vec> nodes);

/// Softmax over paths of the summed node scores. Empty input gives empty output.
std::vector<double> path_attention(const std::vector<std::vector<double>>& per_path_scores);

/// Position k of the result combines node k of every path that reaches that
/// depth; shorter paths behave as zero-padded. WeightedSum returns
/// sum_j w_j node_jk; MaxPool takes the elementwise max over the paths present
/// at position k and ignores the weights.
std::vector<Vec> unify_paths(std::span<const double> path_weights,
                             const std::vector<std::vector<Vec>>& paths, Pooling pooling);

/// Softmax of focal . R_k over the unified positions, padded out to
/// `max_depth` entries that carry exactly zero weight.
std::vector<double> node_attention_weights(const Vec& focal, std::span<const Vec> unified,
                                           std::size_t max_depth);

/// sum_k theta_k w_k R_k. All positions padded gives the zero vector.
Vec node_attention_combine(const Vec& focal, std::span<const Vec> unified, const Vec& theta);

/// Attention-weighted sum of one-hop neighbors; zero vector when there are none.
Vec facet_vector_single_hop(const Vec& focal, std::span<const Vec> neighbors);
std::vector<double> single_hop_weights(const Vec& focal, std::span<const Vec> neighbors);

/// Convex combination of the enabled facets with softmax(logits) restricted
/// to them. Disabled facets get weight exactly 0.
Vec combine_contexts(const std::array<Vec, kFacetCount>& facets, const Eigen::Vector4d& logits,
                     unsigned enabled = kAllFacets);
Eigen::Vector4d facet_weights(const Eigen::Vector4d& logits, unsigned enabled);

/// Parameter-independent intermediates for one concept.
struct ContextEncoding {
  Vec focal;
  std::vector<std::vector<double>> node_scores;  // per lineage path
  std::vector<double> path_weights;              // per lineage path
  std::vector<Vec> unified;                      // R_k for each reached depth
  std::vector<double> node_weights;              // max_depth entries, 0 where masked
  std::vector<Vec> weighted_nodes;               // w_k R_k, F_a = sum_k theta_k * this
  std::array<std::vector<double>, kFacetCount> neighbor_weights;  // one-hop facets
  std::array<Vec, kFacetCount> facets;           // ancestors slot left zero (needs theta)
};

ContextEncoding encode_context(const ModelConfig& config, const ConceptInput& input);

struct ForwardTrace {
  std::shared_ptr<const ContextEncoding> encoding;
  std::array<Vec, kFacetCount> facets;
  Eigen::Vector4d facet_weights = Eigen::Vector4d::Zero();
  Vec context;  // v
  Vec input;    // [u; v]
  Vec output;   // f(c)
};

ForwardTrace concept_forward(const ModelParams& params, std::shared_ptr<const ContextEncoding> encoding);
ForwardTrace concept_forward(const ModelParams& params, const ConceptInput& input);

/// Properties are compared on their label embeddings alone.
inline Vec property_forward(const Vec& label_embedding) { return label_embedding; }

/// Cosine similarity; 0 when either vector is zero.
double similarity(const Vec& x, const Vec& y);

/// Mean squared error. Throws ShapeError on a length mismatch or empty input.
double loss(std::span<const double> predictions, std::span<const int> labels);

struct Gradients {
  Mat W;
  Vec theta;
  Eigen::Vector4d category_logits;

  static Gradients zeros_like(const ModelParams& params);
  void set_zero();
};

/// Gradients of (H(s, t) - label)^2 for a single pair.
Gradients backward(const ForwardTrace& source, const ForwardTrace& target, double label,
                   const ModelParams& params);

/// Adds d(loss)/d(params) given d(loss)/d(output) of one concept.
void accumulate_backward(const ForwardTrace& trace, const Vec& output_grad,
                         const ModelParams& params, Gradients& grads);

struct PairRef {
  const ContextEncoding* source;
  const ContextEncoding* target;
  double label;
};

/// Mean squared error of a batch with its gradient. Concepts shared by several
/// pairs are forwarded once. `grads` may be null; `scores` receives H per pair
/// when non-null.
double batch_loss(const ModelParams& params, std::span<const PairRef> pairs, Gradients* grads,
                  std::vector<double>* scores = nullptr);

/// f(c) for each encoding, one column per concept.
Mat represent_all(const ModelParams& params, std::span<const ContextEncoding* const> encodings);

}  // namespace ontoalign
