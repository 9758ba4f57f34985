#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dterm/types.hpp"

namespace dterm {

/// Per-agent status of the basic (non fault-tolerant) termination method.
struct BasicTermState {
  StatusBits v;            // believed local-criterion status of every agent
  Iteration t_scalar = 0;  // believed iteration at which the last agent became satisfied
};

/// Snapshot of a neighbor's BasicTermState at the end of the previous iteration.
struct BasicMessage {
  AgentId sender = 0;
  Iteration stamped = 0;  // iteration whose end-state this message carries
  StatusBits v;
  Iteration t_scalar = 0;
};

template <class State>
struct StepOutcome {
  State state;
  bool terminate = false;
};

struct BasicOptions {
  /// Literal rule text: the scalar max ranges over neighbors only. The default folds
  /// the agent's own previous scalar into the max; see README for why.
  bool strict_verbatim_t = false;
};

BasicTermState init_basic(std::size_t agent_count);

/// One iteration of the basic rules for agent `self`.
///
/// Order: neighbor merge, then own-entry flip, then the termination test. `inbox`
/// must hold exactly one message per entry of `neighbors`, each stamped t - 1.
StepOutcome<BasicTermState> step_basic(AgentId self, const BasicTermState& state, bool b_local,
                                       std::span<const BasicMessage> inbox,
                                       std::span<const AgentId> neighbors, Iteration t,
                                       std::size_t diameter, BasicOptions options = {});

BasicMessage make_message(AgentId sender, const BasicTermState& state, Iteration stamped);

/// First iteration at which every agent's bit is set. Row r of `bits` holds the
/// local-criterion bits of iteration r + 1. Returns nullopt when that never happens.
std::optional<Iteration> global_criterion_oracle(const std::vector<StatusBits>& bits);

}  // namespace dterm
