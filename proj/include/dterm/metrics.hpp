#pragma once

#include <set>
#include <string>
#include <vector>

#include "dterm/scenario.hpp"
#include "dterm/sim.hpp"

namespace dterm {

struct Persistence {
  std::size_t max_single = 0;
  std::size_t max_global = 0;
};

/// Recomputes the persistence figures from a complete trace. Agents without a record
/// at some iteration (terminated earlier) keep their last vector.
Persistence measure_persistence(const std::vector<TraceRecord>& trace,
                                const std::vector<StatusBits>& bits,
                                const std::set<AgentId>& faulty, std::size_t agent_count);

/// Smallest per-agent share of the rounds after the global criterion in which the
/// agent skipped its optimisation step. Requires a terminated run.
double savings_fraction(const RunReport& report);

/// Fraction predicted when the last agent to satisfy its criterion is at eccentricity D.
double expected_savings(std::size_t diameter, std::size_t agent_count);

enum class Verdict { pass, fail, skipped };

std::string to_string(Verdict v);

struct PropositionCheck {
  std::string id;
  Verdict verdict = Verdict::skipped;
  std::string evidence;
};

/// Checked properties.
///
/// basic: status-latency, full-vector-sound, exact-termination
/// fault_tolerant: persistence-bound, no-early-termination, appropriate-termination,
/// detector-soundness
std::vector<PropositionCheck> assert_propositions(const RunReport& report, const Scenario& scenario,
                                                  const ValidationReport& validation);

bool any_failed(const std::vector<PropositionCheck>& checks);

}  // namespace dterm
