#include "dterm/metrics.hpp"

#include <algorithm>
#include <map>

namespace dterm {

Persistence measure_persistence(const std::vector<TraceRecord>& trace,
                                const std::vector<StatusBits>& bits,
                                const std::set<AgentId>& faulty, std::size_t n) {
  Persistence out;
  std::vector<StatusBits> v(n, StatusBits(n, 0));
  std::vector<std::size_t> single(n * n, 0), global(n, 0);
  std::size_t pos = 0;
  for (std::size_t row = 0; row < bits.size(); ++row) {
    const Iteration t = static_cast<Iteration>(row) + 1;
    while (pos < trace.size() && trace[pos].iteration == t) {
      v[trace[pos].agent] = trace[pos].v;
      ++pos;
    }
    const bool global_now = all_set(bits[row]);
    for (AgentId i = 0; i < n; ++i) {
      if (faulty.count(i)) continue;
      for (AgentId k = 0; k < n; ++k) {
        auto& run = single[i * n + k];
        run = (v[i][k] && !bits[row][k]) ? run + 1 : 0;
        out.max_single = std::max(out.max_single, run);
      }
      global[i] = (all_set(v[i]) && !global_now) ? global[i] + 1 : 0;
      out.max_global = std::max(out.max_global, global[i]);
    }
  }
  return out;
}

double savings_fraction(const RunReport& report) {
  if (!report.all_terminated() || !report.global_satisfied) {
    throw ContractError("savings need a run in which every agent terminated");
  }
  double best = 1.0;
  for (AgentId i = 0; i < report.agent_count; ++i) {
    const Iteration rounds = *report.termination[i] - *report.global_satisfied;
    if (rounds <= 0) continue;
    best = std::min(best, double(report.skipped_after_global[i]) / double(rounds));
  }
  return best;
}

double expected_savings(std::size_t d, std::size_t n) {
  const double total = double(ft_termination_offset(d, n));
  return total == 0 ? 1.0 : double(d + n - 1) / total;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

bool any_failed(const std::vector<PropositionCheck>& checks) {
  return std::any_of(checks.begin(), checks.end(),
                     [](const auto& c) { return c.verdict == Verdict::fail; });
}

namespace {

PropositionCheck pass(std::string id, std::string evidence) {
  return {std::move(id), Verdict::pass, std::move(evidence)};
}
PropositionCheck fail(std::string id, std::string evidence) {
  return {std::move(id), Verdict::fail, std::move(evidence)};
}
PropositionCheck skip(std::string id, std::string reason) {
  return {std::move(id), Verdict::skipped, std::move(reason)};
}

std::string it(const std::optional<Iteration>& t) { return t ? std::to_string(*t) : "none"; }

bool bits_monotone(const std::vector<StatusBits>& rows) {
  for (std::size_t r = 1; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (rows[r - 1][i] && !rows[r][i]) return false;
    }
  }
  return true;
}

// Termination must be common to all agents and equal to `expected` when given,
// otherwise at or after the global criterion.
PropositionCheck check_common(const std::string& id, const RunReport& rep, const Scenario& sc,
                              std::optional<Iteration> expected) {
  const auto tg = rep.global_satisfied;
  if (!rep.all_terminated()) {
    bool none = std::none_of(rep.termination.begin(), rep.termination.end(),
                             [](const auto& t) { return t.has_value(); });
    if (!none) return fail(id, "only some agents terminated");
    if (!tg) return pass(id, "global criterion never held and no agent terminated");
    if (expected && *expected > sc.max_iterations) {
      return skip(id, "iteration budget ends before T_G + offset = " + std::to_string(*expected));
    }
    if (!expected && rep.iterations_run >= sc.max_iterations) {
      return skip(id, "iteration budget exhausted before termination");
    }
    return fail(id, "no agent terminated although T_G = " + it(tg));
  }
  auto common = rep.common_termination();
  if (!common) {
    auto [lo, hi] = std::minmax_element(rep.termination.begin(), rep.termination.end());
    return fail(id, "termination not simultaneous: " + it(*lo) + ".." + it(*hi));
  }
  if (!tg) return fail(id, "terminated at " + it(common) + " without the global criterion");
  if (expected) {
    if (*common != *expected) {
      return fail(id, "terminated at " + it(common) + ", expected " + std::to_string(*expected));
    }
    return pass(id, "all agents terminated at " + it(common) + " = T_G " + it(tg) + " + offset");
  }
  if (*common < *tg) return fail(id, "terminated at " + it(common) + " before T_G " + it(tg));
  return pass(id, "all agents terminated at " + it(common) + " >= T_G " + it(tg));
}

std::vector<PropositionCheck> basic_checks(const RunReport& rep, const Scenario& sc) {
  std::vector<PropositionCheck> out;
  const bool faults = !sc.faults.empty();
  const std::size_t n = rep.agent_count;

  if (faults) {
    out.push_back(skip("status-latency", "fault scripts present"));
  } else if (!rep.trace_complete) {
    out.push_back(skip("status-latency", "trace not fully retained in memory"));
  } else {
    std::vector<std::optional<Iteration>> first(n);
    for (std::size_t r = 0; r < rep.bits.size(); ++r) {
      for (AgentId j = 0; j < n; ++j) {
        if (rep.bits[r][j] && !first[j]) first[j] = static_cast<Iteration>(r) + 1;
      }
    }
    std::optional<PropositionCheck> bad;
    for (const auto& rec : rep.trace) {
      for (AgentId j = 0; j < n && !bad; ++j) {
        const bool want = first[j] &&
                          rec.iteration >= *first[j] + static_cast<Iteration>(sc.graph.distance(rec.agent, j));
        if (bool(rec.v[j]) != want) {
          bad = fail("status-latency", "agent " + std::to_string(rec.agent) + " entry " +
                                           std::to_string(j) + " is " + std::to_string(rec.v[j]) +
                                           " at iteration " + std::to_string(rec.iteration));
        }
      }
      if (bad) break;
    }
    out.push_back(bad ? *bad : pass("status-latency", "every entry flips exactly d(i,j) after satisfaction"));
  }

  if (faults) {
    out.push_back(skip("full-vector-sound", "fault scripts present"));
  } else {
    std::optional<PropositionCheck> bad;
    for (const auto& s : rep.series) {
      if (s.full_vector > 0 && (!rep.global_satisfied || s.iteration < *rep.global_satisfied)) {
        bad = fail("full-vector-sound", std::to_string(s.full_vector) + " full vectors at iteration " +
                                            std::to_string(s.iteration) + " before T_G " +
                                            it(rep.global_satisfied));
        break;
      }
    }
    out.push_back(bad ? *bad : pass("full-vector-sound", "no full vector before T_G " + it(rep.global_satisfied)));
  }

  if (faults) {
    out.push_back(skip("exact-termination", "fault scripts present"));
  } else if (sc.flags.strict_verbatim_t) {
    out.push_back(skip("exact-termination", "strict verbatim T mode"));
  } else {
    std::optional<Iteration> expected;
    if (rep.global_satisfied) expected = *rep.global_satisfied + static_cast<Iteration>(rep.diameter);
    out.push_back(check_common("exact-termination", rep, sc, expected));
  }
  return out;
}

std::vector<PropositionCheck> ft_checks(const RunReport& rep, const Scenario& sc,
                                        const ValidationReport& val) {
  std::vector<PropositionCheck> out;
  const auto tg = rep.global_satisfied;
  const std::size_t n = rep.agent_count;
  const auto bound = static_cast<std::size_t>(
      std::max<std::int64_t>(0, static_cast<std::int64_t>(rep.diameter + n) - 2));

  if (val.faulty_set_is_cutset) {
    out.push_back(skip("persistence-bound", "precondition A4 violated"));
  } else if (rep.max_single_persistence > bound) {
    out.push_back(fail("persistence-bound", "persistence " + std::to_string(rep.max_single_persistence) +
                                                " > D + n - 2 = " + std::to_string(bound)));
  } else {
    out.push_back(pass("persistence-bound", "persistence " + std::to_string(rep.max_single_persistence) +
                                                " <= " + std::to_string(bound)));
  }

  std::string reason;
  if (val.faulty_set_is_cutset) reason = "precondition A4 violated";
  else if (val.faulty_set_has_last_satisfier) reason = "precondition A5 violated";

  if (!reason.empty()) {
    out.push_back(skip("no-early-termination", reason));
  } else {
    std::optional<PropositionCheck> bad;
    for (AgentId i = 0; i < n; ++i) {
      if (rep.termination[i] && (!tg || *rep.termination[i] < *tg)) {
        bad = fail("no-early-termination", "agent " + std::to_string(i) + " terminated at " +
                                               it(rep.termination[i]) + ", T_G " + it(tg));
        break;
      }
    }
    out.push_back(bad ? *bad : pass("no-early-termination", "no termination before T_G " + it(tg)));
  }

  Iteration last_fault = 0;
  for (const auto& f : sc.faults) last_fault = std::max(last_fault, f.last_active().value_or(0));
  if (!reason.empty()) {
    out.push_back(skip("appropriate-termination", reason));
  } else if (!sc.faults.empty() && (!tg || last_fault > *tg)) {
    out.push_back(skip("appropriate-termination", "faults active after T_G"));
  } else {
    std::optional<Iteration> expected;
    if (sc.faults.empty() && tg && bits_monotone(rep.bits)) {
      expected = *tg + ft_termination_offset(rep.diameter, n);
    }
    out.push_back(check_common("appropriate-termination", rep, sc, expected));
  }

  std::optional<PropositionCheck> bad;
  std::size_t honest_reports = 0;
  for (const auto& r : rep.fault_reports) {
    // An injector's detector compares against what it believes it sent, not what its
    // neighbors received, so its accusations carry no evidence.
    if (rep.faulty_agents.count(r.accuser)) continue;
    ++honest_reports;
    if (!rep.faulty_agents.count(r.accused)) {
      bad = fail("detector-soundness", "agent " + std::to_string(r.accuser) + " accused honest agent " +
                                           std::to_string(r.accused) + " at " + std::to_string(r.iteration));
      break;
    }
  }
  out.push_back(bad ? *bad
                    : pass("detector-soundness",
                           std::to_string(honest_reports) + " reports from honest agents, all against scripted agents"));
  return out;
}

}  // namespace

std::vector<PropositionCheck> assert_propositions(const RunReport& report, const Scenario& scenario,
                                                  const ValidationReport& validation) {
  return report.method == Method::basic ? basic_checks(report, scenario)
                                        : ft_checks(report, scenario, validation);
}

}  // namespace dterm
