#pragma once

#include <cmath>
#include <cstdint>

#include "ontoalign/model.hpp"

namespace ontoalign {

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam over every trainable tensor of ModelParams, with bias correction.
class Adam {
 public:
  Adam(const ModelParams& params, AdamOptions options)
      : options_(options),
        m_(Gradients::zeros_like(params)),
        v_(Gradients::zeros_like(params)) {}

  void step(ModelParams& params, const Gradients& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    update(params.W, m_.W, v_.W, grads.W, c1, c2);
    update(params.theta, m_.theta, v_.theta, grads.theta, c1, c2);
    update(params.category_logits, m_.category_logits, v_.category_logits, grads.category_logits, c1, c2);
  }

  std::uint64_t steps() const { return t_; }

 private:
  template <typename P, typename G>
  void update(P& param, G& m, G& v, const G& g, double c1, double c2) const {
    m = options_.beta1 * m + (1.0 - options_.beta1) * g;
    v = options_.beta2 * v + (1.0 - options_.beta2) * g.cwiseProduct(g);
    param.array() -= options_.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + options_.epsilon);
  }

  AdamOptions options_;
  Gradients m_;
  Gradients v_;
  std::uint64_t t_ = 0;
};

}  // namespace ontoalign
