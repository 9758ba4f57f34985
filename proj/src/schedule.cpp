#include "dterm/schedule.hpp"

#include <algorithm>

namespace dterm {

bool schedule_bit(const Schedule& s, AgentId i, Iteration t) {
  if (i >= s.satisfy_at.size()) throw ContractError("schedule has no agent " + std::to_string(i));
  // Later overrides for the same (agent, iteration) win.
  for (auto it = s.overrides.rbegin(); it != s.overrides.rend(); ++it) {
    if (it->agent == i && it->iteration == t) return it->bit;
  }
  const auto& at = s.satisfy_at[i];
  return at.has_value() && t >= *at;
}

Iteration schedule_horizon(const Schedule& s) {
  Iteration h = 0;
  for (const auto& at : s.satisfy_at) {
    if (at) h = std::max(h, *at);
  }
  for (const auto& o : s.overrides) h = std::max(h, o.iteration);
  return h;
}

bool is_monotone(const Schedule& s) {
  const Iteration horizon = schedule_horizon(s) + 1;
  for (AgentId i = 0; i < s.agent_count(); ++i) {
    bool seen = false;
    for (Iteration t = 0; t <= horizon; ++t) {
      bool b = schedule_bit(s, i, t);
      if (seen && !b) return false;
      seen = seen || b;
    }
  }
  return true;
}

void validate_relaxed_monotone(const Schedule& s, Iteration hold) {
  const Iteration horizon = schedule_horizon(s) + 1;
  for (AgentId i = 0; i < s.agent_count(); ++i) {
    Iteration run = 0;
    for (Iteration t = 0; t <= horizon; ++t) {
      if (schedule_bit(s, i, t)) {
        ++run;
      } else if (run >= hold) {
        throw ValidationError("A3", "agent " + std::to_string(i) + " drops its criterion at t=" +
                                        std::to_string(t) + " after holding it for " +
                                        std::to_string(run) + " >= " + std::to_string(hold) +
                                        " iterations");
      } else {
        run = 0;
      }
    }
  }
}

std::vector<StatusBits> schedule_matrix(const Schedule& s, Iteration horizon) {
  std::vector<StatusBits> rows;
  rows.reserve(static_cast<std::size_t>(std::max<Iteration>(horizon, 0)));
  for (Iteration t = 1; t <= horizon; ++t) {
    StatusBits row(s.agent_count());
    for (AgentId i = 0; i < s.agent_count(); ++i) row[i] = schedule_bit(s, i, t);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dterm
