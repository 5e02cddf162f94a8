#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "iwtm/automata.hpp"
#include "iwtm/detail/check.hpp"
#include "iwtm/rng.hpp"

namespace iwtm {

enum class Polarity : std::uint8_t { Negative = 0, Positive = 1 };

// A clause that includes no literal is vacuously true.  During learning
// that truth is kept so feedback can grow the clause out of the empty
// state; at inference an always-true clause carries no information and is
// forced to 0.
enum class EvalMode : std::uint8_t { Learning, Inference };

// Literal view of a binary feature vector x of length o: positions
// 0..o-1 hold x_k, positions o..2o-1 hold the negations 1 - x_k.
class LiteralVector {
 public:
  static LiteralVector from_features(std::span<const std::uint8_t> x) {
    LiteralVector lv;
    lv.num_features_ = x.size();
    lv.bits_.resize(2 * x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      detail::require(x[k] <= 1, "LiteralVector: feature bit outside {0,1}");
      lv.bits_[k] = x[k];
      lv.bits_[x.size() + k] = static_cast<std::uint8_t>(1 - x[k]);
    }
    return lv;
  }

  std::uint8_t operator[](std::size_t literal) const noexcept {
    return bits_[literal];
  }

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t num_features() const noexcept { return num_features_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t num_features_ = 0;
};

// Conjunctive clause owned by a machine: one Tsetlin automaton per
// literal decides membership, and an integer weight scales the clause's
// vote.  The weight stays at its initial value 1 unless the machine runs
// with integer weighting.
//
// The set of included literals is cached and rebuilt after any feedback
// that moves an automaton, so evaluation only touches the included
// literals instead of scanning the whole team.
class Clause {
 public:
  Clause(std::size_t num_features, std::uint32_t half_states,
         Polarity polarity, RandomStream& rng)
      : polarity_(polarity) {
    detail::require(num_features > 0, "Clause: num_features must be > 0");
    team_.reserve(2 * num_features);
    for (std::size_t k = 0; k < 2 * num_features; ++k) {
      team_.push_back(TsetlinAutomaton::boundary(half_states, rng));
    }
    rebuild_included();
  }

  Polarity polarity() const noexcept { return polarity_; }
  std::size_t team_size() const noexcept { return team_.size(); }

  std::uint64_t weight() const noexcept { return weight_.value(); }
  void set_weight(std::uint64_t value) noexcept { weight_ = SslWeight(value); }
  void increment_weight() { weight_.increment(); }
  void decrement_weight() noexcept { weight_.decrement(); }

  std::uint32_t ta_state(std::size_t literal) const {
    detail::require(literal < team_.size(), "Clause: literal index out of range");
    return team_[literal].state();
  }

  void set_ta_state(std::size_t literal, std::uint32_t state) {
    detail::require(literal < team_.size(), "Clause: literal index out of range");
    team_[literal] = TsetlinAutomaton(team_[literal].half_states(), state);
    rebuild_included();
  }

  // Ascending indexes of literals whose automaton currently says Include.
  std::vector<std::size_t> included_literals() const {
    return {included_.begin(), included_.end()};
  }

  std::size_t included_count() const noexcept { return included_.size(); }

  bool evaluate(const LiteralVector& literals, EvalMode mode) const noexcept {
    detail::require(literals.size() == team_.size(),
                    "Clause::evaluate: literal vector arity mismatch");
    if (included_.empty()) return mode == EvalMode::Learning;
    for (const std::uint32_t idx : included_) {
      if (!literals[idx]) return false;
    }
    return true;
  }

  // Type I feedback: combats false negatives and forgets.  With the
  // clause true on this example, automata of satisfied literals are
  // nudged toward Include with probability (s-1)/s each; every other
  // automaton is nudged toward Exclude with probability 1/s.  Exactly one
  // draw is taken per automaton, so the stream advances by team_size()
  // regardless of outcomes.
  template <typename Rng>
  void apply_type_i(const LiteralVector& literals, bool clause_output,
                    double s, Rng& rng) {
    detail::require(literals.size() == team_.size(),
                    "Clause::apply_type_i: literal vector arity mismatch");
    detail::require(s >= 1.0, "Clause::apply_type_i: s must be >= 1");
    const double p_include = (s - 1.0) / s;
    const double p_exclude = 1.0 / s;
    bool flipped = false;
    for (std::size_t k = 0; k < team_.size(); ++k) {
      if (clause_output && literals[k]) {
        if (rng.bernoulli(p_include)) flipped |= team_[k].nudge_include();
      } else {
        if (rng.bernoulli(p_exclude)) flipped |= team_[k].nudge_exclude();
      }
    }
    if (flipped) rebuild_included();
  }

  // Type II feedback: combats false positives.  Only acts when the clause
  // fired; every automaton whose literal is 0 on this example takes one
  // deterministic step toward Include, so the clause soon demands a
  // literal that contradicts the example.
  void apply_type_ii(const LiteralVector& literals, bool clause_output) {
    detail::require(literals.size() == team_.size(),
                    "Clause::apply_type_ii: literal vector arity mismatch");
    if (!clause_output) return;
    bool flipped = false;
    for (std::size_t k = 0; k < team_.size(); ++k) {
      if (!literals[k]) flipped |= team_[k].nudge_include();
    }
    if (flipped) rebuild_included();
  }

 private:
  void rebuild_included() {
    included_.clear();
    for (std::size_t k = 0; k < team_.size(); ++k) {
      if (team_[k].includes()) included_.push_back(static_cast<std::uint32_t>(k));
    }
  }

  std::vector<TsetlinAutomaton> team_;
  std::vector<std::uint32_t> included_;
  SslWeight weight_;
  Polarity polarity_;
};

}  // namespace iwtm
