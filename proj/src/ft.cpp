#include "dterm/ft.hpp"

#include <algorithm>
#include <cassert>

#include "detail/inbox.hpp"

namespace dterm {

FtTermState init_ft(std::size_t agent_count) {
  if (agent_count == 0) throw ContractError("agent_count must be positive");
  FtTermState s;
  s.v_now.assign(agent_count, 0);
  s.v_prev.assign(agent_count, 0);
  s.v_prev2.assign(agent_count, 0);
  s.u.assign(agent_count, 0);
  s.reject_until.assign(agent_count, 0);
  return s;
}

std::vector<Iteration> correction_countdown(const FtTermState& state, Iteration t) {
  std::vector<Iteration> c(state.reject_until.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::max<Iteration>(0, state.reject_until[k] - t);
  return c;
}

FtMessage make_message(AgentId sender, const FtTermState& state, Iteration stamped) {
  return FtMessage{sender, stamped, state.v_now, state.u, state.t_scalar};
}

FtStepOutcome step_ft(AgentId self, const FtTermState& state, bool b_local,
                      std::span<const FtMessage> inbox, std::span<const AgentId> neighbors,
                      Iteration t, std::size_t diameter, FtOptions options) {
  const std::size_t n = state.v_now.size();
  if (self >= n) throw ContractError("self id out of range");
  if (t < 1) throw ContractError("iteration must be >= 1");
  detail::check_inbox(inbox, neighbors, n, t);
  for (const auto& msg : inbox) {
    if (msg.u.size() != n) throw ContractError("message stamp vector length mismatch");
  }

  const auto d = static_cast<Iteration>(diameter);
  const Iteration window = options.correction_diameters * d + static_cast<Iteration>(n) - 1;
  auto blocked = [&](std::size_t k) { return state.reject_until[k] > t - 1; };

  FtStepOutcome out;
  FtTermState& next = out.state;
  next.v_prev2 = state.v_prev;
  next.v_prev = state.v_now;
  next.v_now = state.v_now;
  next.u = state.u;
  next.reject_until = state.reject_until;

  auto clear_entry = [&](std::size_t k) {
    next.v_now[k] = 0;
    next.u[k] = t;
    Iteration until = state.u[k] + window;
    if (until < t) {
      ++out.clamped_corrections;
      until = t;
    }
    next.reject_until[k] = until;
    out.cleared.push_back(k);
  };

  // Own entry.
  if (b_local && !state.v_now[self] && !blocked(self)) {
    next.v_now[self] = 1;
    next.u[self] = t;
  }

  // Remote entries, accepted only from neighbors whose stamp lies in [t - D, t - 1].
  std::vector<std::uint8_t> accepted(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == self || state.v_now[k] || blocked(k)) continue;
    Iteration best = -1;
    for (const auto& msg : inbox) {
      if (msg.v[k] && msg.u[k] >= t - d && msg.u[k] <= t - 1) best = std::max(best, msg.u[k]);
    }
    if (best >= 0) {
      next.v_now[k] = 1;
      next.u[k] = best;
      accepted[k] = 1;
    }
  }

  next.t_scalar = *std::max_element(next.u.begin(), next.u.end());

  // A reported own status that the local criterion no longer supports is retracted.
  if (state.v_now[self] && !b_local) {
    clear_entry(self);
    next.t_scalar = t;
  }

  if (t >= 2) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!state.v_prev[k] || !state.v_now[k] || !next.v_now[k]) continue;
      bool discrepancy = std::any_of(inbox.begin(), inbox.end(), [&](const FtMessage& msg) {
        return !msg.v[k] || msg.u[k] != state.u[k];
      });
      if (!discrepancy) continue;
      assert(!accepted[k]);
      clear_entry(k);
      next.t_scalar = t;
    }
  }

  out.terminate = all_set(next.v_now) &&
                  t >= next.t_scalar + ft_termination_offset(diameter, n);
  return out;
}

std::vector<FaultReport> detect_faulty_neighbors(AgentId self, const StatusBits& own_older,
                                                 const StatusBits& own_before,
                                                 std::span<const NeighborHistory> neighbors,
                                                 Iteration s) {
  std::vector<FaultReport> reports;
  for (std::size_t k = 0; k < own_before.size(); ++k) {
    if (!own_older[k] || own_before[k]) continue;
    for (const auto& nb : neighbors) {
      if (!nb.older || !nb.before || !nb.latest) continue;
      if ((*nb.older)[k] && (*nb.before)[k] && (*nb.latest)[k]) {
        reports.push_back(FaultReport{self, nb.sender, k, s - 1});
      }
    }
  }
  return reports;
}

std::vector<FaultReport> FaultDetector::observe(AgentId self, const FtTermState& state,
                                                std::span<const FtMessage> inbox, Iteration s) {
  if (older_.size() != inbox.size()) {
    older_.resize(inbox.size());
    before_.resize(inbox.size());
  }
  std::vector<NeighborHistory> history;
  history.reserve(inbox.size());
  for (std::size_t idx = 0; idx < inbox.size(); ++idx) {
    NeighborHistory h{inbox[idx].sender, nullptr, nullptr, &inbox[idx].v};
    if (!older_[idx].empty()) h.older = &older_[idx];
    if (!before_[idx].empty()) h.before = &before_[idx];
    history.push_back(h);
  }
  auto reports = detect_faulty_neighbors(self, state.v_prev2, state.v_prev, history, s);
  for (std::size_t idx = 0; idx < inbox.size(); ++idx) {
    older_[idx] = std::move(before_[idx]);
    before_[idx] = inbox[idx].v;
  }
  return reports;
}

}  // namespace dterm
