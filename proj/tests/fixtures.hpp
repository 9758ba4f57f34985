#pragma once

#include <vector>

#include "dterm/scenario.hpp"

namespace fixture {

using namespace dterm;

inline Schedule schedule(std::vector<std::optional<Iteration>> at) { return Schedule{std::move(at), {}}; }

inline Scenario scripted(CommGraph g, Method m, std::vector<std::optional<Iteration>> at,
                         Iteration max_iterations = 200) {
  Scenario sc(std::move(g), m, schedule(std::move(at)));
  sc.max_iterations = max_iterations;
  return sc;
}

// 22 agents, diameter 7, 36 links; agent 8 is the last to satisfy, at 862, and no other
// agent first satisfies inside the final fault burst's correction window.
inline CommGraph twenty_two() { return make_with_diameter(31, 22, 7, 36); }

inline std::vector<std::optional<Iteration>> twenty_two_schedule() {
  return {640, 702, 588, 715, 731, 455, 702, 690, 862, 577, 749,
          610, 733, 521, 668, 794, 720, 603, 745, 756, 499, 681};
}

inline Scenario twenty_two_scenario(Method m, const std::vector<AgentId>& faulty = {}) {
  Scenario sc = scripted(twenty_two(), m, twenty_two_schedule(), 1000);
  for (AgentId a : faulty) sc.faults.push_back(FaultScript::periodic(a, 100, 100, 20, 820));
  return sc;
}

inline const std::vector<std::vector<AgentId>>& faulty_rows() {
  static const std::vector<std::vector<AgentId>> rows{{1}, {1, 3}, {1, 3, 4}, {1, 3, 4, 9}, {1, 3, 4, 9, 14}};
  return rows;
}

}  // namespace fixture
