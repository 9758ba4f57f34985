#pragma once

#include <span>
#include <vector>

#include "dterm/basic.hpp"
#include "dterm/types.hpp"

namespace dterm {

/// Per-agent status of the fault-tolerant termination method.
///
/// The correction vector is held as an absolute "reject until" iteration per entry;
/// correction_countdown() renders the decrementing counter used in traces. An entry
/// whose countdown at t - 1 is positive refuses updates at iteration t.
struct FtTermState {
  StatusBits v_now;    // V at the last completed iteration t
  StatusBits v_prev;   // V at t - 1
  StatusBits v_prev2;  // V at t - 2 (only consulted by the faulty-neighbor detector)
  std::vector<Iteration> u;  // termination iteration vector
  Iteration t_scalar = 0;
  std::vector<Iteration> reject_until;
};

struct FtMessage {
  AgentId sender = 0;
  Iteration stamped = 0;
  StatusBits v;
  std::vector<Iteration> u;
  Iteration t_scalar = 0;
};

struct FtOptions {
  /// Multiplier on D in the correction window. 2 matches the clearing rule and the
  /// termination offset; 1 is the shorter window mentioned in the method's prose
  /// (experiments only, no correctness guarantees).
  int correction_diameters = 2;
};

struct FtStepOutcome {
  FtTermState state;
  bool terminate = false;
  std::vector<AgentId> cleared;         // entries reset by discrepancy detection this step
  std::size_t clamped_corrections = 0;  // correction windows that would have been negative
};

FtTermState init_ft(std::size_t agent_count);

/// Countdown form of the correction vector at iteration `t`.
std::vector<Iteration> correction_countdown(const FtTermState& state, Iteration t);

FtMessage make_message(AgentId sender, const FtTermState& state, Iteration stamped);

/// One iteration of the fault-tolerant rules for agent `self`.
///
/// Applied in order: own-entry flip, windowed neighbor acceptance, scalar refresh,
/// discrepancy clearing (t >= 2), correction countdown, termination test. A local
/// criterion that drops back to 0 after being reported clears the agent's own entry
/// through the same clearing path, which is how non-monotone criteria are absorbed.
FtStepOutcome step_ft(AgentId self, const FtTermState& state, bool b_local,
                      std::span<const FtMessage> inbox, std::span<const AgentId> neighbors,
                      Iteration t, std::size_t diameter, FtOptions options = {});

/// Own entry was 1 at t - 1 while a neighbor reports 0 at t: some status is faulty.
constexpr bool check_p4(bool self_prev_entry, bool neighbor_entry) {
  return self_prev_entry && !neighbor_entry;
}

/// A freshly set entry stamped outside [t - D, t] is necessarily faulty.
constexpr bool check_p5(Iteration u_entry, Iteration t, std::size_t diameter) {
  return u_entry > t || u_entry < t - static_cast<Iteration>(diameter);
}

/// Offset after the last satisfaction at which the fault-tolerant rules terminate.
constexpr Iteration ft_termination_offset(std::size_t diameter, std::size_t agent_count) {
  return 2 * static_cast<Iteration>(diameter) + static_cast<Iteration>(agent_count) - 1;
}

struct FaultReport {
  AgentId accuser = 0;
  AgentId accused = 0;
  AgentId subject = 0;
  Iteration iteration = 0;  // iteration of the accused agent's offending status

  bool operator==(const FaultReport&) const = default;
};

/// Three consecutive statuses of one neighbor, oldest first, as seen in the inboxes of
/// iterations s - 2, s - 1 and s.
struct NeighborHistory {
  AgentId sender = 0;
  const StatusBits* older = nullptr;   // V_j at s - 3
  const StatusBits* before = nullptr;  // V_j at s - 2
  const StatusBits* latest = nullptr;  // V_j at s - 1
};

/// Accuses neighbors that keep asserting an entry after this agent cleared it.
///
/// The agent cleared entry k at s - 2 (own V was 1 at s - 3 and 0 at s - 2). Every
/// honest neighbor that held k at s - 3 and s - 2 must clear it at s - 1 once it sees
/// the 0, so a neighbor still reporting 1 at s - 1 after holding it through that
/// window did not apply the clearing rule. Neighbors that only picked the entry up at
/// s - 2 are not accused; they are allowed one more iteration.
std::vector<FaultReport> detect_faulty_neighbors(AgentId self, const StatusBits& own_older,
                                                 const StatusBits& own_before,
                                                 std::span<const NeighborHistory> neighbors,
                                                 Iteration s);

/// Keeps the two previous inboxes of one agent so detect_faulty_neighbors can be
/// evaluated every iteration.
class FaultDetector {
 public:
  FaultDetector() = default;
  explicit FaultDetector(std::size_t neighbor_count) : older_(neighbor_count), before_(neighbor_count) {}

  /// `inbox` is the inbox of iteration s, in neighbor order; `state` is the agent's
  /// state before stepping iteration s.
  std::vector<FaultReport> observe(AgentId self, const FtTermState& state,
                                   std::span<const FtMessage> inbox, Iteration s);

 private:
  std::vector<StatusBits> older_;
  std::vector<StatusBits> before_;
};

}  // namespace dterm
