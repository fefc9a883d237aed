#pragma once

#include <cstddef>
#include <span>

namespace ontoalign {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
};

/// Precision, recall and F1 of the positive class. Zero denominators give 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion counts;
};

Metrics metrics_from_counts(const Confusion& c);
Metrics metrics(std::span<const int> predictions, std::span<const int> truth);

}  // namespace ontoalign
