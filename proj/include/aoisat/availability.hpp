#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoisat/error.hpp"
#include "aoisat/rng.hpp"

namespace aoisat {

enum class TraceWrap { repeat, truncate };

// State preceding slot 0 of a geometric process.
enum class InitialState { stationary, available, unavailable };

/// Two-state satellite availability M(t): either a geometric (two-state
/// Markov) model or a slot-indexed replay of a visibility trace.
///
/// step() advances one slot and returns M for that slot. For the geometric
/// model the initial state is the state *before* the first slot, so the
/// first call already applies one transition.
class AvailabilityProcess {
 public:
  static AvailabilityProcess geometric(double lambda_a, double lambda_u,
                                       InitialState initial = InitialState::stationary) {
    if (!(lambda_a > 0.0 && lambda_a <= 1.0) || !(lambda_u > 0.0 && lambda_u <= 1.0))
      throw ConfigError("geometric availability needs lambda_a, lambda_u in (0, 1]");
    AvailabilityProcess p;
    p.geometric_ = true;
    p.lambda_a_ = lambda_a;
    p.lambda_u_ = lambda_u;
    p.initial_ = initial;
    return p;
  }

  static AvailabilityProcess trace(std::vector<std::uint8_t> samples, TraceWrap wrap = TraceWrap::repeat) {
    if (samples.empty()) throw ConfigError("availability trace is empty");
    AvailabilityProcess p;
    p.geometric_ = false;
    p.samples_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(samples));
    p.wrap_ = wrap;
    return p;
  }

  bool is_geometric() const noexcept { return geometric_; }
  double lambda_a() const noexcept { return lambda_a_; }
  double lambda_u() const noexcept { return lambda_u_; }
  TraceWrap wrap() const noexcept { return wrap_; }
  const std::vector<std::uint8_t>& samples() const noexcept { return *samples_; }
  InitialState initial_state() const noexcept { return initial_; }

  /// Long-run fraction of slots with M(t) = 1.
  double availability_fraction() const {
    if (geometric_) return lambda_u_ / (lambda_a_ + lambda_u_);
    std::size_t on = 0;
    for (auto s : *samples_) on += s ? 1 : 0;
    return static_cast<double>(on) / static_cast<double>(samples_->size());
  }

  bool step(Rng& rng) {
    if (geometric_) {
      if (!state_) {
        switch (initial_) {
          case InitialState::stationary:
            state_ = rng.bernoulli(availability_fraction());
            break;
          case InitialState::available:
            state_ = true;
            break;
          case InitialState::unavailable:
            state_ = false;
            break;
        }
      }
      const double flip = *state_ ? lambda_a_ : lambda_u_;
      if (rng.bernoulli(flip)) state_ = !*state_;
      return *state_;
    }
    if (cursor_ >= samples_->size()) {
      if (wrap_ == TraceWrap::truncate) throw EndOfTrace();
      cursor_ = 0;
    }
    state_ = (*samples_)[cursor_++] != 0;
    return *state_;
  }

  /// Last value returned by step(), if any.
  std::optional<bool> current() const noexcept { return state_; }

  /// Rewind to the pre-slot-0 state.
  void reset() noexcept {
    state_.reset();
    cursor_ = 0;
  }

 private:
  AvailabilityProcess() = default;

  bool geometric_ = true;
  double lambda_a_ = 0.5;
  double lambda_u_ = 0.5;
  InitialState initial_ = InitialState::stationary;
  // Immutable and shared between copies of the process.
  std::shared_ptr<const std::vector<std::uint8_t>> samples_ = std::make_shared<const std::vector<std::uint8_t>>();
  TraceWrap wrap_ = TraceWrap::repeat;

  std::optional<bool> state_;
  std::size_t cursor_ = 0;
};

}  // namespace aoisat
