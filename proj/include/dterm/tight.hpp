#pragma once

#include <cstdint>
#include <optional>

#include "dterm/scenario.hpp"

namespace dterm {

struct TightInstance {
  Scenario scenario;  // graph, schedule and the single persistent fault script
  AgentId faulty = 0;
  AgentId subject = 0;
  std::size_t persistence = 0;
};

/// Single-injector scenario used by the search: every agent but `subject` is satisfied
/// from iteration 1, `subject` never is, and `faulty` claims the subject from
/// iteration 3 for 2D + n - 1 iterations.
Scenario persistence_probe(const CommGraph& graph, AgentId faulty, AgentId subject);

/// Random search over graphs with `agent_count` agents and diameter `target_diameter`
/// and every admissible (faulty, subject) pair for a run whose persistence reaches
/// D + n - 2. `search_budget` bounds the number of simulated runs. Returns nothing
/// when the budget runs out or no admissible pair exists (n < 3).
std::optional<TightInstance> find_tight_instance(std::size_t agent_count, std::size_t target_diameter,
                                                 std::size_t search_budget, std::uint64_t seed);

}  // namespace dterm
