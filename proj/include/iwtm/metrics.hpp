#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace iwtm {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }

  void add(int truth, int predicted) {
    if ((truth != 0 && truth != 1) || (predicted != 0 && predicted != 1)) {
      throw std::invalid_argument("ConfusionCounts: labels must be 0 or 1");
    }
    if (truth == 1) {
      predicted == 1 ? ++tp : ++fn;
    } else {
      predicted == 1 ? ++fp : ++tn;
    }
  }

  static ConfusionCounts from_predictions(std::span<const int> truth,
                                          std::span<const int> predicted) {
    if (truth.size() != predicted.size()) {
      throw std::invalid_argument(
          "ConfusionCounts: " + std::to_string(truth.size()) +
          " labels but " + std::to_string(predicted.size()) + " predictions");
    }
    ConfusionCounts counts;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      counts.add(truth[i], predicted[i]);
    }
    return counts;
  }

  bool operator==(const ConfusionCounts&) const = default;
};

// A ratio with an empty denominator carries no information; it is
// reported as 0 and flagged so callers can tell "bad" apart from
// "undefined" (e.g. precision with no positive predictions at all).
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double specificity = 0.0;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;
  bool specificity_degenerate = false;

  bool operator==(const Metrics&) const = default;
};

inline Metrics compute_metrics(const ConfusionCounts& counts) {
  if (counts.total() == 0) {
    throw std::invalid_argument("compute_metrics: no evaluated rows");
  }
  Metrics metrics;
  const auto ratio = [](std::uint64_t numerator, std::uint64_t denominator,
                        double& value, bool& degenerate) {
    if (denominator == 0) {
      value = 0.0;
      degenerate = true;
    } else {
      value = static_cast<double>(numerator) /
              static_cast<double>(denominator);
    }
  };
  ratio(counts.tp, counts.tp + counts.fp, metrics.precision,
        metrics.precision_degenerate);
  ratio(counts.tp, counts.tp + counts.fn, metrics.recall,
        metrics.recall_degenerate);
  // Harmonic mean of precision and recall, computed in counts directly:
  // 2tp / (2tp + fp + fn).
  ratio(2 * counts.tp, 2 * counts.tp + counts.fp + counts.fn, metrics.f1,
        metrics.f1_degenerate);
  metrics.accuracy = static_cast<double>(counts.tp + counts.tn) /
                     static_cast<double>(counts.total());
  ratio(counts.tn, counts.tn + counts.fp, metrics.specificity,
        metrics.specificity_degenerate);
  return metrics;
}

}  // namespace iwtm
