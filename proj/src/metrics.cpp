#include "ontoalign/metrics.hpp"

#include "ontoalign/error.hpp"

namespace ontoalign {

Metrics metrics_from_counts(const Confusion& c) {
  Metrics m;
  m.counts = c;
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

Metrics metrics(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size()) throw ShapeError("predictions and ground truth differ in length");
  Confusion c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool t = truth[i] == 1;
    c.tp += p && t;
    c.fp += p && !t;
    c.fn += !p && t;
  }
  return metrics_from_counts(c);
}

}  // namespace ontoalign
