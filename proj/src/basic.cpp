#include "dterm/basic.hpp"

#include <algorithm>

#include "detail/inbox.hpp"

namespace dterm {

BasicTermState init_basic(std::size_t agent_count) {
  if (agent_count == 0) throw ContractError("agent_count must be positive");
  return BasicTermState{StatusBits(agent_count, 0), 0};
}

BasicMessage make_message(AgentId sender, const BasicTermState& state, Iteration stamped) {
  return BasicMessage{sender, stamped, state.v, state.t_scalar};
}

StepOutcome<BasicTermState> step_basic(AgentId self, const BasicTermState& state, bool b_local,
                                       std::span<const BasicMessage> inbox,
                                       std::span<const AgentId> neighbors, Iteration t,
                                       std::size_t diameter, BasicOptions options) {
  const std::size_t n = state.v.size();
  if (self >= n) throw ContractError("self id out of range");
  if (t < 1) throw ContractError("iteration must be >= 1");
  detail::check_inbox(inbox, neighbors, n, t);

  BasicTermState next = state;

  // Merge neighbor views. Own entry is never taken from neighbors.
  Iteration t_max = options.strict_verbatim_t ? 0 : state.t_scalar;
  for (const auto& msg : inbox) t_max = std::max(t_max, msg.t_scalar);
  next.t_scalar = t_max;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == self) continue;
    std::uint8_t merged = 0;
    for (const auto& msg : inbox) merged |= msg.v[k];
    next.v[k] = merged;
  }

  // First local satisfaction stamps the scalar with the current iteration.
  if (state.v[self] == 0 && b_local) {
    next.v[self] = 1;
    next.t_scalar = t;
  }

  bool terminate =
      all_set(next.v) && t >= next.t_scalar + static_cast<Iteration>(diameter);
  return {std::move(next), terminate};
}

std::optional<Iteration> global_criterion_oracle(const std::vector<StatusBits>& bits) {
  for (std::size_t row = 0; row < bits.size(); ++row) {
    if (!bits[row].empty() && all_set(bits[row])) return static_cast<Iteration>(row + 1);
  }
  return std::nullopt;
}

}  // namespace dterm
