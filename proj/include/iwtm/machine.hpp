#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwtm/clause.hpp"
#include "iwtm/detail/check.hpp"
#include "iwtm/rng.hpp"

namespace iwtm {

// None keeps every clause weight pinned at 1 and reproduces the classic
// machine exactly; Integer lets the weights learn through the SSL rule.
enum class Weighting : std::uint8_t { None, Integer };

struct MachineConfig {
  std::uint32_t num_clauses = 100;   // m, even: half vote for, half against
  std::uint32_t threshold = 15;      // T, vote clamp and feedback scale
  double specificity = 3.0;          // s, inverse forgetting rate
  std::uint32_t ta_half_states = 100;  // N, per-action state depth
  std::uint32_t epochs = 100;
  Weighting weighting = Weighting::None;
  std::uint64_t seed = 42;

  void validate() const {
    if (num_clauses < 2 || num_clauses % 2 != 0) {
      throw std::invalid_argument(
          "MachineConfig: num_clauses must be even and >= 2, got " +
          std::to_string(num_clauses));
    }
    if (threshold < 1) {
      throw std::invalid_argument("MachineConfig: threshold must be >= 1");
    }
    if (!(specificity >= 1.0)) {
      throw std::invalid_argument(
          "MachineConfig: specificity must be >= 1, got " +
          std::to_string(specificity));
    }
    if (ta_half_states < 1) {
      throw std::invalid_argument("MachineConfig: ta_half_states must be >= 1");
    }
  }

  bool operator==(const MachineConfig&) const = default;
};

// Probability that any given clause is selected for feedback on a sample
// with this target label, as a function of the clamped vote sum.  The
// intensity measures how far the vote still is from agreeing with the
// label by a margin of T: it is 1 when the sample is maximally lost and
// fades to 0 once enough clauses already push the right way.  Every
// clause draws selection with this same probability; whether a selected
// clause then receives Type I or Type II feedback depends only on its
// polarity relative to the label.
inline double feedback_probability(std::int64_t vote, std::uint32_t threshold,
                                   int target_label) {
  if (threshold < 1) {
    throw std::invalid_argument("feedback_probability: threshold must be >= 1");
  }
  const std::int64_t t = static_cast<std::int64_t>(threshold);
  const std::int64_t clamped = std::clamp(vote, -t, t);
  const std::int64_t numerator =
      target_label == 1 ? t - clamped : t + clamped;
  return static_cast<double>(numerator) / static_cast<double>(2 * t);
}

// Snapshot of one clause, used for serialization and for assembling
// machines with prescribed state in tests and tools.
struct ClauseSnapshot {
  std::uint64_t weight = 1;
  std::vector<std::uint32_t> ta_states;  // length 2o
};

// Coalition of conjunctive clauses voting on a binary label.  Clauses at
// even index vote for class 1, odd index against; the weighted vote sum
// decides the class, and during training its clamped value throttles how
// much feedback each clause receives.
//
// Randomness is split by role: one stream shuffles the training order,
// one serves clause initialization and feedback.  Both derive from the
// seed, so runs are reproducible across platforms, and keeping a single
// feedback stream leaves the generator state hot in cache during
// training.
class Machine {
 public:
  Machine(const MachineConfig& config, std::size_t num_features)
      : config_(config),
        num_features_(num_features),
        order_stream_(0),
        feedback_stream_(0) {
    config_.validate();
    if (num_features_ == 0) {
      throw std::invalid_argument("Machine: num_features must be > 0");
    }
    const RandomStream master(config_.seed);
    order_stream_ = master.derive(0);
    feedback_stream_ = master.derive(1);
    clauses_.reserve(config_.num_clauses);
    for (std::uint32_t j = 0; j < config_.num_clauses; ++j) {
      clauses_.emplace_back(num_features_, config_.ta_half_states,
                            polarity_of(j), feedback_stream_);
    }
  }

  // Rebuild a machine from per-clause snapshots (model load).  Snapshot
  // counts and state ranges are validated; the random streams end up in
  // the same position as a freshly constructed machine's, so continued
  // training is well defined.
  static Machine from_parts(const MachineConfig& config,
                            std::size_t num_features,
                            const std::vector<ClauseSnapshot>& parts) {
    Machine machine(config, num_features);
    if (parts.size() != machine.num_clauses()) {
      throw std::invalid_argument(
          "Machine::from_parts: expected " +
          std::to_string(machine.num_clauses()) + " clause snapshots, got " +
          std::to_string(parts.size()));
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const ClauseSnapshot& part = parts[j];
      if (part.ta_states.size() != 2 * num_features) {
        throw std::invalid_argument(
            "Machine::from_parts: clause " + std::to_string(j) +
            " has wrong team size");
      }
      if (config.weighting == Weighting::None && part.weight != 1) {
        throw std::invalid_argument(
            "Machine::from_parts: clause " + std::to_string(j) +
            " carries weight " + std::to_string(part.weight) +
            " but weighting is none");
      }
      for (std::size_t k = 0; k < part.ta_states.size(); ++k) {
        const std::uint32_t state = part.ta_states[k];
        if (state < 1 || state > 2 * config.ta_half_states) {
          throw std::invalid_argument(
              "Machine::from_parts: clause " + std::to_string(j) +
              " automaton " + std::to_string(k) + " state " +
              std::to_string(state) + " outside [1, 2N]");
        }
        machine.clauses_[j].set_ta_state(k, state);
      }
      machine.clauses_[j].set_weight(part.weight);
    }
    return machine;
  }

  const MachineConfig& config() const noexcept { return config_; }
  std::size_t num_features() const noexcept { return num_features_; }
  std::size_t num_clauses() const noexcept { return clauses_.size(); }

  const Clause& clause(std::size_t j) const {
    detail::require(j < clauses_.size(), "Machine: clause index out of range");
    return clauses_[j];
  }

  Clause& clause(std::size_t j) {
    detail::require(j < clauses_.size(), "Machine: clause index out of range");
    return clauses_[j];
  }

  static Polarity polarity_of(std::uint32_t clause_index) noexcept {
    return clause_index % 2 == 0 ? Polarity::Positive : Polarity::Negative;
  }

  // Weighted vote sum over all clauses.  Zero-weight clauses contribute
  // nothing either way, so they are skipped.
  std::int64_t vote_sum(const LiteralVector& literals, EvalMode mode) const {
    detail::require(literals.num_features() == num_features_,
                    "Machine::vote_sum: feature arity mismatch");
    std::int64_t v = 0;
    for (const Clause& clause : clauses_) {
      const std::uint64_t w =
          config_.weighting == Weighting::None ? 1 : clause.weight();
      if (w == 0) continue;
      if (!clause.evaluate(literals, mode)) continue;
      const std::int64_t signed_w = static_cast<std::int64_t>(w);
      v += clause.polarity() == Polarity::Positive ? signed_w : -signed_w;
    }
    return v;
  }

  // Predicted class for one feature vector; ties go to class 1.
  int classify(std::span<const std::uint8_t> x) const {
    check_features(x);
    const LiteralVector literals = LiteralVector::from_features(x);
    return vote_sum(literals, EvalMode::Inference) >= 0 ? 1 : 0;
  }

  std::vector<int> predict_batch(
      const std::vector<std::vector<std::uint8_t>>& rows) const {
    std::vector<int> predictions;
    predictions.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != num_features_) {
        throw std::invalid_argument(
            "Machine::predict_batch: row " + std::to_string(i) + " has " +
            std::to_string(rows[i].size()) + " features, expected " +
            std::to_string(num_features_));
      }
      predictions.push_back(classify(rows[i]));
    }
    return predictions;
  }

  // One online update.  Clause outputs and the vote sum are snapshotted
  // before any clause changes, then each clause independently decides
  // whether it takes part in this round: clauses matching the label side
  // are candidates for Type I feedback, the others for Type II, with
  // selection probability shrinking as the vote sum nears the clamp.
  // Under integer weighting, a selected clause that fired also moves its
  // weight: up on Type I (it voted usefully), down on Type II (it voted
  // against the label), and the weight move costs no random draws.
  void train_step(std::span<const std::uint8_t> x, int label) {
    check_features(x);
    check_label(label);
    const LiteralVector literals = LiteralVector::from_features(x);
    train_on_literals(literals, label);
  }

  // Epochs of example-shuffled online training.  Row order is drawn from
  // the machine's own order stream, so repeated fits with the same seed
  // and data replay the exact same updates.
  void fit(const std::vector<std::vector<std::uint8_t>>& rows,
           std::span<const int> labels, std::uint32_t epochs) {
    if (rows.empty()) {
      throw std::invalid_argument("Machine::fit: training set is empty");
    }
    if (labels.size() != rows.size()) {
      throw std::invalid_argument(
          "Machine::fit: " + std::to_string(rows.size()) + " rows but " +
          std::to_string(labels.size()) + " labels");
    }
    std::vector<LiteralVector> literals;
    literals.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != num_features_) {
        throw std::invalid_argument(
            "Machine::fit: row " + std::to_string(i) + " has " +
            std::to_string(rows[i].size()) + " features, expected " +
            std::to_string(num_features_));
      }
      check_label(labels[i]);
      literals.push_back(LiteralVector::from_features(rows[i]));
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::uint32_t epoch = 0; epoch < epochs; ++epoch) {
      order_stream_.shuffle(order);
      for (const std::size_t i : order) {
        train_on_literals(literals[i], labels[i]);
      }
    }
  }

  void fit(const std::vector<std::vector<std::uint8_t>>& rows,
           std::span<const int> labels) {
    fit(rows, labels, config_.epochs);
  }

 private:
  void check_features(std::span<const std::uint8_t> x) const {
    if (x.size() != num_features_) {
      throw std::invalid_argument(
          "Machine: feature vector has " + std::to_string(x.size()) +
          " entries, expected " + std::to_string(num_features_));
    }
    for (const std::uint8_t bit : x) {
      if (bit > 1) {
        throw std::invalid_argument("Machine: feature bits must be 0 or 1");
      }
    }
  }

  static void check_label(int label) {
    if (label != 0 && label != 1) {
      throw std::invalid_argument("Machine: label must be 0 or 1, got " +
                                  std::to_string(label));
    }
  }

  void train_on_literals(const LiteralVector& literals, int label) {
    const std::size_t m = clauses_.size();
    outputs_.resize(m);
    std::int64_t v = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const bool out = clauses_[j].evaluate(literals, EvalMode::Learning);
      outputs_[j] = out ? 1 : 0;
      if (!out) continue;
      const std::uint64_t w =
          config_.weighting == Weighting::None ? 1 : clauses_[j].weight();
      if (w == 0) continue;
      const std::int64_t signed_w = static_cast<std::int64_t>(w);
      v += clauses_[j].polarity() == Polarity::Positive ? signed_w : -signed_w;
    }
    const double p = feedback_probability(v, config_.threshold, label);
    for (std::size_t j = 0; j < m; ++j) {
      if (!feedback_stream_.bernoulli(p)) continue;
      const bool positive = clauses_[j].polarity() == Polarity::Positive;
      const bool fired = outputs_[j] != 0;
      if (positive == (label == 1)) {
        clauses_[j].apply_type_i(literals, fired, config_.specificity,
                                 feedback_stream_);
        if (config_.weighting == Weighting::Integer && fired) {
          clauses_[j].increment_weight();
        }
      } else {
        clauses_[j].apply_type_ii(literals, fired);
        if (config_.weighting == Weighting::Integer && fired) {
          clauses_[j].decrement_weight();
        }
      }
    }
  }

  MachineConfig config_;
  std::size_t num_features_;
  std::vector<Clause> clauses_;
  RandomStream order_stream_;
  RandomStream feedback_stream_;
  std::vector<std::uint8_t> outputs_;  // scratch, reused across steps
};

}  // namespace iwtm
