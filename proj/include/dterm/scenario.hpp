#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dterm/admm.hpp"
#include "dterm/graph.hpp"
#include "dterm/schedule.hpp"

namespace dterm {

enum class Method { basic, fault_tolerant };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// Rewrites one agent's outbound status messages.
///
/// While active, every subject entry is reported as satisfied. The stamp attached to
/// it is copied from the agent's previous outbound message when that message already
/// claimed the entry, and is the current iteration otherwise, so an uninterrupted
/// burst keeps a single stamp. The faulty agent's own state is never touched.
struct FaultScript {
  AgentId faulty_agent = 0;
  std::vector<AgentId> subjects;  // empty: every agent except the faulty one
  std::vector<std::pair<Iteration, Iteration>> active;  // half-open [begin, end) ranges

  bool active_at(Iteration t) const;
  std::optional<Iteration> last_active() const;
  std::vector<AgentId> resolved_subjects(std::size_t agent_count) const;

  /// Bursts of `length` iterations starting at `start`, `start + period`, ... with no
  /// activity at or after `until`.
  static FaultScript periodic(AgentId agent, Iteration start, Iteration period, Iteration length,
                              Iteration until, std::vector<AgentId> subjects = {});
};

struct ScenarioFlags {
  bool reduced_computation = false;
  bool strict_verbatim_t = false;
  bool prose_correction_constant = false;
};

struct AdmmCriterion {
  AdmmProblem problem;
  bool latch = true;
};

using CriterionSource = std::variant<Schedule, AdmmCriterion>;

struct Scenario {
  Scenario(CommGraph g, Method m, CriterionSource c, std::vector<FaultScript> f = {})
      : graph(std::move(g)), method(m), criterion(std::move(c)), faults(std::move(f)) {}

  CommGraph graph;
  Method method = Method::basic;
  CriterionSource criterion;
  std::vector<FaultScript> faults;
  Iteration max_iterations = 1000;
  ScenarioFlags flags;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t trace_memory_cap = std::numeric_limits<std::size_t>::max();

  std::set<AgentId> faulty_agents() const;
};

struct ValidationReport {
  std::vector<std::string> warnings;
  bool faulty_set_is_cutset = false;        // A4 violated
  bool faulty_set_has_last_satisfier = false;  // A5 proxy violated (schedules only)
};

/// Hard errors throw ValidationError; A4 / A5-proxy problems are reported as warnings
/// and flagged so the affected proposition checks can be skipped.
ValidationReport validate(const Scenario& scenario);

}  // namespace dterm
