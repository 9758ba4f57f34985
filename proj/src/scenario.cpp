#include "dterm/scenario.hpp"

#include <algorithm>

#include "dterm/basic.hpp"

namespace dterm {

std::string to_string(Method m) { return m == Method::basic ? "basic" : "fault_tolerant"; }

Method method_from_string(const std::string& s) {
  if (s == "basic") return Method::basic;
  if (s == "fault_tolerant" || s == "ft") return Method::fault_tolerant;
  throw ValidationError("", "unknown method '" + s + "' (expected basic or fault_tolerant)");
}

bool FaultScript::active_at(Iteration t) const {
  return std::any_of(active.begin(), active.end(),
                     [t](const auto& r) { return t >= r.first && t < r.second; });
}

std::optional<Iteration> FaultScript::last_active() const {
  std::optional<Iteration> last;
  for (const auto& [b, e] : active) {
    if (e > b) last = std::max(last.value_or(e - 1), e - 1);
  }
  return last;
}

std::vector<AgentId> FaultScript::resolved_subjects(std::size_t agent_count) const {
  if (!subjects.empty()) return subjects;
  std::vector<AgentId> all;
  for (AgentId k = 0; k < agent_count; ++k) {
    if (k != faulty_agent) all.push_back(k);
  }
  return all;
}

FaultScript FaultScript::periodic(AgentId agent, Iteration start, Iteration period,
                                  Iteration length, Iteration until,
                                  std::vector<AgentId> subjects) {
  if (period <= 0 || length <= 0) throw ContractError("periodic fault needs positive period and length");
  FaultScript f;
  f.faulty_agent = agent;
  f.subjects = std::move(subjects);
  for (Iteration b = start; b < until; b += period) f.active.emplace_back(b, std::min(b + length, until));
  return f;
}

std::set<AgentId> Scenario::faulty_agents() const {
  std::set<AgentId> s;
  for (const auto& f : faults) s.insert(f.faulty_agent);
  return s;
}

namespace {

// Agents whose local criterion first completes the global one.
std::set<AgentId> last_satisfiers(const Schedule& s) {
  const Iteration horizon = schedule_horizon(s) + 1;
  auto rows = schedule_matrix(s, horizon);
  auto tg = global_criterion_oracle(rows);
  std::set<AgentId> out;
  if (!tg) return out;
  for (AgentId i = 0; i < s.agent_count(); ++i) {
    bool before = *tg > 1 && rows[static_cast<std::size_t>(*tg - 2)][i];
    if (!before) out.insert(i);
  }
  return out;
}

}  // namespace

ValidationReport validate(const Scenario& sc) {
  ValidationReport report;
  const std::size_t n = sc.graph.agent_count();
  const std::size_t d = sc.graph.diameter();

  if (sc.max_iterations < 1) throw ValidationError("", "max_iterations must be >= 1");
  if (sc.threads < 1) throw ValidationError("", "threads must be >= 1");

  std::set<AgentId> last;
  if (const auto* sched = std::get_if<Schedule>(&sc.criterion)) {
    if (sched->agent_count() != n) {
      throw ValidationError("", "schedule lists " + std::to_string(sched->agent_count()) +
                                    " agents, graph has " + std::to_string(n));
    }
    for (AgentId i = 0; i < n; ++i) {
      if (sched->satisfy_at[i] && *sched->satisfy_at[i] < 1) {
        throw ValidationError("", "satisfy_at for agent " + std::to_string(i) + " must be >= 1");
      }
    }
    for (const auto& o : sched->overrides) {
      if (o.agent >= n) throw ValidationError("", "override names unknown agent " + std::to_string(o.agent));
      if (o.iteration < 1) throw ValidationError("", "override iteration must be >= 1");
    }
    if (!is_monotone(*sched)) {
      if (sc.method == Method::basic) {
        throw ValidationError("A3", "the basic method requires monotone local criteria");
      }
      validate_relaxed_monotone(*sched, static_cast<Iteration>(d + n) - 1);
    }
    last = last_satisfiers(*sched);
  } else {
    const auto& admm = std::get<AdmmCriterion>(sc.criterion);
    AdmmSystem check(admm.problem, sc.graph);
    (void)check;
    if (sc.method == Method::basic && !admm.latch) {
      throw ValidationError("A3", "the basic method requires a latched mismatch criterion");
    }
  }

  for (const auto& f : sc.faults) {
    if (f.faulty_agent >= n) {
      throw ValidationError("", "fault script names unknown agent " + std::to_string(f.faulty_agent));
    }
    for (AgentId k : f.subjects) {
      if (k >= n) throw ValidationError("", "fault subject " + std::to_string(k) + " out of range");
      if (k == f.faulty_agent) {
        throw ValidationError("A5", "faulty agent " + std::to_string(k) +
                                        " may not misreport its own status");
      }
    }
    for (const auto& [b, e] : f.active) {
      if (b < 1 || e <= b) {
        throw ValidationError("", "fault range [" + std::to_string(b) + ", " + std::to_string(e) +
                                      ") must satisfy 1 <= begin < end");
      }
    }
  }

  auto faulty = sc.faulty_agents();
  if (!faulty.empty()) {
    if (faulty.size() >= n) throw ValidationError("A4", "every agent is scripted as faulty");
    if (sc.graph.is_cutset(faulty)) {
      report.faulty_set_is_cutset = true;
      report.warnings.push_back("A4: faulty agents form a cut-set; fault-tolerance checks are skipped");
    }
    // A faulty agent whose status another injector misreports must be able to get its
    // true status to an honest neighbor, otherwise nothing ever contradicts the claim.
    for (AgentId a : faulty) {
      bool claimed = false;
      for (const auto& f : sc.faults) {
        auto subj = f.resolved_subjects(n);
        claimed = claimed || (f.faulty_agent != a && std::find(subj.begin(), subj.end(), a) != subj.end());
      }
      auto nbrs = sc.graph.neighbors(a);
      bool honest_neighbor = std::any_of(nbrs.begin(), nbrs.end(), [&](AgentId j) { return !faulty.count(j); });
      if (claimed && !honest_neighbor) {
        report.faulty_set_is_cutset = true;
        report.warnings.push_back("A4: faulty agent " + std::to_string(a) +
                                  " is misreported and reaches honest agents only through faulty agents");
      }
    }
    for (AgentId a : faulty) {
      if (last.count(a)) {
        report.faulty_set_has_last_satisfier = true;
        report.warnings.push_back("A5: faulty agent " + std::to_string(a) +
                                  " is the last to satisfy its criterion; termination checks are skipped");
      }
    }
  }
  return report;
}

}  // namespace dterm
