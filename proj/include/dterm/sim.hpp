#pragma once

#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "dterm/ft.hpp"
#include "dterm/scenario.hpp"
#include "dterm/trace.hpp"

namespace dterm {

struct IterationCounts {
  Iteration iteration = 0;
  std::size_t locally_satisfied = 0;
  std::size_t full_vector = 0;
  std::size_t terminated = 0;
};

struct RunReport {
  Method method = Method::basic;
  std::size_t agent_count = 0;
  std::size_t diameter = 0;
  Iteration iterations_run = 0;

  std::vector<std::optional<Iteration>> termination;  // per agent
  std::optional<Iteration> global_satisfied;          // first iteration with every bit set

  std::vector<StatusBits> bits;  // row r: local-criterion bits of iteration r + 1
  std::vector<IterationCounts> series;

  std::set<AgentId> faulty_agents;
  std::size_t max_single_persistence = 0;
  std::size_t max_global_persistence = 0;
  std::vector<FaultReport> fault_reports;

  std::vector<std::size_t> computation_rounds;          // per agent
  std::vector<std::size_t> skipped_after_global;        // per agent, rounds in (T_G, termination]
  std::size_t clamped_corrections = 0;
  std::size_t post_termination_reads = 0;  // inbox entries served from a terminated agent

  /// ADMM runs: each agent's iterate at its final termination scalar.
  std::vector<Eigen::VectorXd> solution;
  /// ADMM runs: each agent's latest iterate when the run stopped.
  std::vector<Eigen::VectorXd> final_iterate;

  std::vector<TraceRecord> trace;  // retained records (see trace_complete)
  bool trace_complete = true;

  bool all_terminated() const;
  /// Common termination iteration when every agent terminated at the same iteration.
  std::optional<Iteration> common_termination() const;
  bool any_early_termination() const;
};

struct RunOptions {
  std::ostream* trace_spill = nullptr;
  TraceFormat trace_format = TraceFormat::csv;
  bool record_trace = true;
};

/// Executes the scenario round by round. Throws ValidationError when the scenario does
/// not validate; running out of iterations is reported through `termination` instead.
RunReport run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace dterm
