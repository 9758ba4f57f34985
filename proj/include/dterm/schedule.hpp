#pragma once

#include <optional>
#include <vector>

#include "dterm/types.hpp"

namespace dterm {

/// Scripted local-criterion bit stream.
///
/// Without overrides agent i's bit is 1 exactly from satisfy_at[i] onward (never, when
/// unset). Overrides replace the baseline bit at single iterations and are the only
/// way to script a non-monotone criterion.
struct Schedule {
  struct Override {
    AgentId agent = 0;
    Iteration iteration = 0;
    bool bit = false;
  };

  std::vector<std::optional<Iteration>> satisfy_at;
  std::vector<Override> overrides;

  std::size_t agent_count() const { return satisfy_at.size(); }
};

bool schedule_bit(const Schedule& s, AgentId i, Iteration t);

/// True when every agent's bit stream is non-decreasing.
bool is_monotone(const Schedule& s);

/// Last iteration at which any override or baseline flip happens; bits are constant after it.
Iteration schedule_horizon(const Schedule& s);

/// Relaxed monotonicity: once an agent's bit has stayed 1 for `hold` consecutive
/// iterations it must never drop again. Throws ValidationError("A3", ...) otherwise.
void validate_relaxed_monotone(const Schedule& s, Iteration hold);

/// Bits of every agent at iterations 1..horizon, row r holding iteration r + 1.
std::vector<StatusBits> schedule_matrix(const Schedule& s, Iteration horizon);

/// Raw mismatch test, optionally latched with the previous bit.
constexpr bool admm_criterion(double mismatch, double tolerance, bool latch, bool previous_bit) {
  bool raw = mismatch < tolerance;
  return latch ? (raw || previous_bit) : raw;
}

}  // namespace dterm
