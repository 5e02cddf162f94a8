#pragma once

#include <cstdint>
#include <limits>

#include "iwtm/detail/check.hpp"
#include "iwtm/rng.hpp"

namespace iwtm {

enum class Action : std::uint8_t { Exclude = 0, Include = 1 };

// Two-action Tsetlin automaton with 2N states.
//
// States 1..N select Exclude, states N+1..2N select Include.  Depth of
// state encodes confidence: a reward moves one step deeper into the
// current action's half (saturating at 1 and 2N), a penalty moves one
// step toward the opposite action.  The automaton itself is oblivious to
// what the actions mean; clause logic decides when to reward or penalize.
//
// nudge_include / nudge_exclude are the raw single-step moves.  Feedback
// routines use them directly when the direction is fixed by the rule
// rather than by the current action.
class TsetlinAutomaton {
 public:
  TsetlinAutomaton(std::uint32_t half_states, std::uint32_t state)
      : half_states_(half_states), state_(state) {
    detail::require(half_states >= 1, "TsetlinAutomaton: N must be >= 1");
    detail::require(state >= 1 && state <= 2 * half_states,
                    "TsetlinAutomaton: state outside [1, 2N]");
  }

  // Fresh automaton on the decision boundary: state N or N+1, fair coin.
  // Starting undecided lets early feedback pick the action cheaply.
  static TsetlinAutomaton boundary(std::uint32_t half_states,
                                   RandomStream& rng) {
    detail::require(half_states >= 1, "TsetlinAutomaton: N must be >= 1");
    const std::uint32_t state =
        half_states + (rng.bernoulli(0.5) ? 1u : 0u);
    return TsetlinAutomaton(half_states, state);
  }

  Action action() const noexcept {
    return state_ > half_states_ ? Action::Include : Action::Exclude;
  }

  bool includes() const noexcept { return state_ > half_states_; }

  std::uint32_t state() const noexcept { return state_; }
  std::uint32_t half_states() const noexcept { return half_states_; }

  // Reinforce the current action (deepen), saturating at the ends.
  void reward() noexcept {
    if (includes()) {
      nudge_include();
    } else {
      nudge_exclude();
    }
  }

  // Weaken the current action.  One step toward the other half; from the
  // boundary states N and N+1 this flips the action.
  void penalize() noexcept {
    if (includes()) {
      --state_;
    } else {
      ++state_;
    }
  }

  // Returns true when the move crossed the decision boundary, i.e. the
  // action just changed.
  bool nudge_include() noexcept {
    const bool flipped = state_ == half_states_;
    if (state_ < 2 * half_states_) ++state_;
    return flipped;
  }

  bool nudge_exclude() noexcept {
    const bool flipped = state_ == half_states_ + 1;
    if (state_ > 1) --state_;
    return flipped;
  }

 private:
  std::uint32_t half_states_;
  std::uint32_t state_;
};

// Stochastic-searching-on-the-line automaton at resolution 1, used as an
// integer clause weight.  The value walks on {0, 1, 2, ...}: increment is
// unbounded above, decrement saturates at 0.  Reaching the representable
// ceiling means the surrounding configuration is divergent, and there is
// no meaningful way to continue, so that aborts rather than wrapping.
class SslWeight {
 public:
  SslWeight() noexcept : value_(1) {}
  explicit SslWeight(std::uint64_t value) noexcept : value_(value) {}

  std::uint64_t value() const noexcept { return value_; }

  void increment() {
    detail::require(value_ != std::numeric_limits<std::uint64_t>::max(),
                    "SslWeight: integer weight overflow");
    ++value_;
  }

  void decrement() noexcept {
    if (value_ > 0) --value_;
  }

 private:
  std::uint64_t value_;
};

}  // namespace iwtm
