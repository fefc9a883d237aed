#include "ontoalign/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "ontoalign/error.hpp"
#include "ontoalign/random.hpp"

namespace ontoalign {

namespace {

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

void check_dim(const Vec& v, Eigen::Index dim, const char* what) {
  if (v.size() != dim) {
    throw ShapeError(std::string(what) + ": expected length " + std::to_string(dim) + ", got " +
                     std::to_string(v.size()));
  }
}

bool uses_context(const ModelConfig& config) {
  return config.ablation != Ablation::NoContext && (config.facets & kAllFacets) != 0;
}

// Fills everything in the trace except `output`.
void forward_context(const ModelParams& params, ForwardTrace& trace) {
  const auto& config = params.config;
  const auto& enc = *trace.encoding;
  const auto dim = static_cast<Eigen::Index>(config.dim);
  check_dim(enc.focal, dim, "focal embedding");

  for (auto& f : trace.facets) f = Vec::Zero(dim);
  trace.facet_weights.setZero();
  trace.context = Vec::Zero(dim);
  if (uses_context(config)) {
    if (config.facet_enabled(kAncestors)) {
      for (std::size_t k = 0; k < enc.weighted_nodes.size(); ++k) {
        trace.facets[kAncestors] += params.theta[static_cast<Eigen::Index>(k)] * enc.weighted_nodes[k];
      }
    }
    for (Facet f : {kObjectNeighbors, kChildren, kDatatypeNeighbors}) {
      if (config.facet_enabled(f)) trace.facets[f] = enc.facets[f];
    }
    trace.facet_weights = facet_weights(params.category_logits, config.facets);
    for (std::size_t c = 0; c < kFacetCount; ++c) {
      if (trace.facet_weights[static_cast<Eigen::Index>(c)] != 0.0) {
        trace.context += trace.facet_weights[static_cast<Eigen::Index>(c)] * trace.facets[c];
      }
    }
  }
  trace.input.resize(2 * dim);
  trace.input.head(dim) = enc.focal;
  trace.input.tail(dim) = trace.context;
}

// d(loss)/d(theta, logits) given d(loss)/d(v).
void context_backward(const ForwardTrace& trace, const Vec& context_grad, const ModelConfig& config,
                      Gradients& grads) {
  if (!uses_context(config)) return;
  const auto& enc = *trace.encoding;
  Eigen::Vector4d d_weight = Eigen::Vector4d::Zero();
  for (std::size_t c = 0; c < kFacetCount; ++c) {
    d_weight[static_cast<Eigen::Index>(c)] = context_grad.dot(trace.facets[c]);
  }
  const Eigen::Vector4d& pi = trace.facet_weights;
  const double mean = pi.dot(d_weight);
  grads.category_logits += pi.cwiseProduct(d_weight - Eigen::Vector4d::Constant(mean));

  if (config.facet_enabled(kAncestors)) {
    const double scale = pi[kAncestors];
    for (std::size_t k = 0; k < enc.weighted_nodes.size(); ++k) {
      grads.theta[static_cast<Eigen::Index>(k)] += scale * context_grad.dot(enc.weighted_nodes[k]);
    }
  }
}

// dH/dx and dH/dy for H = cos(x, y); zero when H is pinned by the zero convention.
void cosine_gradients(const Vec& x, const Vec& y, double h, Vec& dx, Vec& dy) {
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) {
    dx = Vec::Zero(x.size());
    dy = Vec::Zero(y.size());
    return;
  }
  dx = y / (nx * ny) - h * x / (nx * nx);
  dy = x / (nx * ny) - h * y / (ny * ny);
}

}  // namespace

ModelParams ModelParams::initialize(const ModelConfig& config, std::uint64_t seed) {
  if (config.dim == 0 || config.out_dim == 0 || config.max_depth == 0) {
    throw ShapeError("model dimensions must be positive");
  }
  ModelParams p;
  p.config = config;
  const auto rows = static_cast<Eigen::Index>(config.out_dim);
  const auto cols = static_cast<Eigen::Index>(2 * config.dim);
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  p.W.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) p.W(r, c) = rng.uniform(-a, a);
  }
  p.theta = Vec::Ones(static_cast<Eigen::Index>(config.max_depth));
  p.category_logits.setZero();
  return p;
}

std::vector<double> path_node_scores(const Vec& focal, std::span<const Vec> nodes) {
  std::vector<double> scores;
  scores.reserve(nodes.size());
  for (const auto& n : nodes) {
    check_dim(n, focal.size(), "path node");
    scores.push_back(focal.dot(n));
  }
  return scores;
}

std::vector<double> path_attention(const std::vector<std::vector<double>>& per_path_scores) {
  std::vector<double> sums;
  sums.reserve(per_path_scores.size());
  for (const auto& s : per_path_scores) {
    double total = 0.0;
    for (double x : s) total += x;
    sums.push_back(total);
  }
  return softmax(sums);
}

std::vector<Vec> unify_paths(std::span<const double> path_weights,
                             const std::vector<std::vector<Vec>>& paths, Pooling pooling) {
  if (pooling == Pooling::WeightedSum && path_weights.size() != paths.size()) {
    throw ShapeError("one weight per path required");
  }
  std::size_t depth = 0;
  Eigen::Index dim = -1;
  for (const auto& p : paths) {
    depth = std::max(depth, p.size());
    for (const auto& n : p) {
      if (dim < 0) dim = n.size();
      check_dim(n, dim, "path node");
    }
  }
  std::vector<Vec> unified;
  unified.reserve(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    Vec r;
    for (std::size_t j = 0; j < paths.size(); ++j) {
      if (k >= paths[j].size()) continue;
      const Vec& node = paths[j][k];
      if (pooling == Pooling::WeightedSum) {
        if (r.size() == 0) r = Vec::Zero(dim);
        r += path_weights[j] * node;
      } else {
        r = r.size() == 0 ? node : Vec(r.cwiseMax(node));
      }
    }
    unified.push_back(std::move(r));
  }
  return unified;
}

std::vector<double> node_attention_weights(const Vec& focal, std::span<const Vec> unified,
                                           std::size_t max_depth) {
  if (unified.size() > max_depth) {
    throw ShapeError("unified path longer than max_depth (" + std::to_string(unified.size()) + " > " +
                     std::to_string(max_depth) + ")");
  }
  std::vector<double> weights = softmax(path_node_scores(focal, unified));
  weights.resize(max_depth, 0.0);
  return weights;
}

Vec node_attention_combine(const Vec& focal, std::span<const Vec> unified, const Vec& theta) {
  const auto weights = node_attention_weights(focal, unified, static_cast<std::size_t>(theta.size()));
  Vec out = Vec::Zero(focal.size());
  for (std::size_t k = 0; k < unified.size(); ++k) {
    out += theta[static_cast<Eigen::Index>(k)] * weights[k] * unified[k];
  }
  return out;
}

std::vector<double> single_hop_weights(const Vec& focal, std::span<const Vec> neighbors) {
  return softmax(path_node_scores(focal, neighbors));
}

Vec facet_vector_single_hop(const Vec& focal, std::span<const Vec> neighbors) {
  const auto weights = single_hop_weights(focal, neighbors);
  Vec out = Vec::Zero(focal.size());
  for (std::size_t j = 0; j < neighbors.size(); ++j) out += weights[j] * neighbors[j];
  return out;
}

Eigen::Vector4d facet_weights(const Eigen::Vector4d& logits, unsigned enabled) {
  Eigen::Vector4d w = Eigen::Vector4d::Zero();
  double top = -INFINITY;
  for (unsigned c = 0; c < kFacetCount; ++c) {
    if ((enabled >> c) & 1U) top = std::max(top, logits[c]);
  }
  if (top == -INFINITY) return w;
  double sum = 0.0;
  for (unsigned c = 0; c < kFacetCount; ++c) {
    if ((enabled >> c) & 1U) {
      w[c] = std::exp(logits[c] - top);
      sum += w[c];
    }
  }
  return w / sum;
}

Vec combine_contexts(const std::array<Vec, kFacetCount>& facets, const Eigen::Vector4d& logits,
                     unsigned enabled) {
  const Eigen::Index dim = facets[0].size();
  for (const auto& f : facets) check_dim(f, dim, "facet vector");
  const Eigen::Vector4d w = facet_weights(logits, enabled);
  Vec v = Vec::Zero(dim);
  for (unsigned c = 0; c < kFacetCount; ++c) {
    if (w[c] != 0.0) v += w[c] * facets[c];
  }
  return v;
}

ContextEncoding encode_context(const ModelConfig& config, const ConceptInput& input) {
  const auto dim = static_cast<Eigen::Index>(config.dim);
  check_dim(input.focal, dim, "focal embedding");
  ContextEncoding enc;
  enc.focal = input.focal;

  for (const auto& path : input.lineage) {
    if (path.size() > config.max_depth) throw ShapeError("lineage path longer than max_depth");
    enc.node_scores.push_back(path_node_scores(input.focal, path));
  }
  if (config.ablation == Ablation::SingleAttention) {
    enc.path_weights.assign(input.lineage.size(), input.lineage.empty() ? 0.0 : 1.0 / static_cast<double>(input.lineage.size()));
  } else {
    enc.path_weights = path_attention(enc.node_scores);
  }
  enc.unified = unify_paths(enc.path_weights, input.lineage, config.pooling);
  enc.node_weights = node_attention_weights(input.focal, enc.unified, config.max_depth);
  for (std::size_t k = 0; k < enc.unified.size(); ++k) {
    enc.weighted_nodes.push_back(enc.node_weights[k] * enc.unified[k]);
  }

  enc.facets[kAncestors] = Vec::Zero(dim);
  const std::array<std::pair<Facet, const std::vector<Vec>*>, 3> hops{{
      {kObjectNeighbors, &input.obj},
      {kChildren, &input.children},
      {kDatatypeNeighbors, &input.data},
  }};
  for (const auto& [facet, neighbors] : hops) {
    enc.neighbor_weights[facet] = single_hop_weights(input.focal, *neighbors);
    Vec f = Vec::Zero(dim);
    for (std::size_t j = 0; j < neighbors->size(); ++j) f += enc.neighbor_weights[facet][j] * (*neighbors)[j];
    enc.facets[facet] = std::move(f);
  }
  return enc;
}

ForwardTrace concept_forward(const ModelParams& params, std::shared_ptr<const ContextEncoding> encoding) {
  ForwardTrace trace;
  trace.encoding = std::move(encoding);
  forward_context(params, trace);
  trace.output = params.W * trace.input;
  return trace;
}

ForwardTrace concept_forward(const ModelParams& params, const ConceptInput& input) {
  return concept_forward(params, std::make_shared<const ContextEncoding>(encode_context(params.config, input)));
}

double similarity(const Vec& x, const Vec& y) {
  check_dim(y, x.size(), "similarity operand");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0);
}

double loss(std::span<const double> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw ShapeError("predictions and labels differ in length");
  if (predictions.empty()) throw ShapeError("loss of an empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - labels[i];
    total += d * d;
  }
  return total / static_cast<double>(predictions.size());
}

Gradients Gradients::zeros_like(const ModelParams& params) {
  Gradients g;
  g.W = Mat::Zero(params.W.rows(), params.W.cols());
  g.theta = Vec::Zero(params.theta.size());
  g.category_logits.setZero();
  return g;
}

void Gradients::set_zero() {
  W.setZero();
  theta.setZero();
  category_logits.setZero();
}

void accumulate_backward(const ForwardTrace& trace, const Vec& output_grad, const ModelParams& params,
                         Gradients& grads) {
  grads.W.noalias() += output_grad * trace.input.transpose();
  if (!uses_context(params.config)) return;
  const auto dim = static_cast<Eigen::Index>(params.config.dim);
  const Vec context_grad = params.W.rightCols(dim).transpose() * output_grad;
  context_backward(trace, context_grad, params.config, grads);
}

Gradients backward(const ForwardTrace& source, const ForwardTrace& target, double label,
                   const ModelParams& params) {
  Gradients grads = Gradients::zeros_like(params);
  const double h = similarity(source.output, target.output);
  Vec ds, dt;
  cosine_gradients(source.output, target.output, h, ds, dt);
  const double coeff = 2.0 * (h - label);
  accumulate_backward(source, coeff * ds, params, grads);
  accumulate_backward(target, coeff * dt, params, grads);
  return grads;
}

double batch_loss(const ModelParams& params, std::span<const PairRef> pairs, Gradients* grads,
                  std::vector<double>* scores) {
  if (pairs.empty()) throw ShapeError("empty batch");
  const auto dim = static_cast<Eigen::Index>(params.config.dim);

  std::unordered_map<const ContextEncoding*, Eigen::Index> column;
  std::vector<const ContextEncoding*> distinct;
  auto index_of = [&](const ContextEncoding* e) {
    const auto [it, inserted] = column.try_emplace(e, static_cast<Eigen::Index>(distinct.size()));
    if (inserted) distinct.push_back(e);
    return it->second;
  };
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cols;
  cols.reserve(pairs.size());
  for (const auto& p : pairs) cols.emplace_back(index_of(p.source), index_of(p.target));

  const auto n = static_cast<Eigen::Index>(distinct.size());
  std::vector<ForwardTrace> traces(distinct.size());
  Mat inputs(2 * dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Non-owning handle; the caller keeps the encodings alive for the call.
    traces[i].encoding = std::shared_ptr<const ContextEncoding>(std::shared_ptr<void>(), distinct[i]);
    forward_context(params, traces[i]);
    inputs.col(i) = traces[i].input;
  }
  const Mat outputs = params.W * inputs;

  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  Mat out_grad;
  if (grads != nullptr) out_grad = Mat::Zero(outputs.rows(), n);
  if (scores != nullptr) scores->assign(pairs.size(), 0.0);
  double total = 0.0;
  Vec ds, dt;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [s, t] = cols[i];
    const Vec fs = outputs.col(s);
    const Vec ft = outputs.col(t);
    const double h = similarity(fs, ft);
    const double diff = h - pairs[i].label;
    total += diff * diff;
    if (scores != nullptr) (*scores)[i] = h;
    if (grads != nullptr) {
      cosine_gradients(fs, ft, h, ds, dt);
      out_grad.col(s) += 2.0 * diff * inv_n * ds;
      out_grad.col(t) += 2.0 * diff * inv_n * dt;
    }
  }
  if (grads != nullptr) {
    grads->W.noalias() += out_grad * inputs.transpose();
    if (uses_context(params.config)) {
      const Mat context_grads = params.W.rightCols(dim).transpose() * out_grad;
      for (Eigen::Index i = 0; i < n; ++i) {
        context_backward(traces[i], context_grads.col(i), params.config, *grads);
      }
    }
  }
  return total * inv_n;
}

Mat represent_all(const ModelParams& params, std::span<const ContextEncoding* const> encodings) {
  const auto dim = static_cast<Eigen::Index>(params.config.dim);
  Mat inputs(2 * dim, static_cast<Eigen::Index>(encodings.size()));
  ForwardTrace trace;
  for (std::size_t i = 0; i < encodings.size(); ++i) {
    trace.encoding = std::shared_ptr<const ContextEncoding>(std::shared_ptr<void>(), encodings[i]);
    forward_context(params, trace);
    inputs.col(static_cast<Eigen::Index>(i)) = trace.input;
  }
  return params.W * inputs;
}

}  // namespace ontoalign
