#include "dterm/campaign.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "dterm/rng.hpp"
#include "dterm/sim.hpp"

namespace dterm {

FaultMode fault_mode_from_string(const std::string& s) {
  if (s == "none") return FaultMode::none;
  if (s == "random") return FaultMode::random;
  if (s == "persistent") return FaultMode::persistent;
  throw ContractError("unknown fault mode '" + s + "' (expected none, random or persistent)");
}

std::string to_string(FaultMode m) {
  switch (m) {
    case FaultMode::none: return "none";
    case FaultMode::random: return "random";
    case FaultMode::persistent: return "persistent";
  }
  return "?";
}

bool CampaignSummary::ok() const {
  return std::all_of(tally.begin(), tally.end(), [](const auto& kv) { return kv.second.fail == 0; });
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CommGraph campaign_graph(Rng& rng, const std::string& kind, std::size_t n) {
  TopologySpec t;
  t.kind = kind;
  t.n = n;
  t.seed = rng.next();
  t.edge_prob = 0.1 + 0.4 * rng.unit();
  if ((kind == "ring" || kind == "with_diameter") && n < 3) t.kind = "path";
  if (t.kind == "with_diameter") {
    // Random trees around a backbone; short backbones rarely survive large n, so fall
    // back to longer ones (a path always works).
    const std::size_t lo = std::max<std::size_t>(2, n / 4 + 1);
    for (t.diameter = lo + rng.below(n - lo); t.diameter + 1 < n; ++t.diameter) {
      try {
        return make_topology(t);
      } catch (const ContractError&) {
      }
    }
  }
  return make_topology(t);
}

std::vector<AgentId> sample(Rng& rng, std::vector<AgentId> pool, std::size_t count) {
  for (std::size_t i = 0; i < count && i < pool.size(); ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(std::min(count, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

// Random injector set avoiding `excluded` that is not a cut-set; empty if none found.
std::vector<AgentId> pick_faulty(Rng& rng, const CommGraph& g, const std::set<AgentId>& excluded,
                                 std::size_t max_count) {
  std::vector<AgentId> pool;
  for (AgentId i = 0; i < g.agent_count(); ++i) {
    if (!excluded.count(i)) pool.push_back(i);
  }
  max_count = std::min(max_count, pool.size());
  if (max_count == 0) return {};
  for (int attempt = 0; attempt < 20; ++attempt) {
    const std::size_t count = 1 + rng.below(max_count);
    auto chosen = sample(rng, pool, count);
    std::set<AgentId> set(chosen.begin(), chosen.end());
    bool isolated = std::any_of(chosen.begin(), chosen.end(), [&](AgentId a) {
      auto nb = g.neighbors(a);
      return std::all_of(nb.begin(), nb.end(), [&](AgentId j) { return set.count(j) > 0; });
    });
    if (!isolated && !g.is_cutset(set)) return chosen;
    max_count = std::max<std::size_t>(1, max_count - 1);
  }
  return {};
}

}  // namespace

Scenario make_campaign_scenario(const CampaignSpec& spec, std::size_t index, std::uint64_t* run_seed) {
  if (spec.n_min < 1 || spec.n_min > spec.n_max) throw ContractError("campaign needs 1 <= n_min <= n_max");
  if (spec.kinds.empty()) throw ContractError("campaign needs at least one topology kind");
  const std::uint64_t seed = mix(spec.seed, index);
  if (run_seed) *run_seed = seed;
  Rng rng(seed);

  const auto n = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(spec.n_min),
                                                      static_cast<std::int64_t>(spec.n_max)));
  CommGraph g = campaign_graph(rng, spec.kinds[rng.below(spec.kinds.size())], n);
  const auto d = static_cast<Iteration>(g.diameter());

  Schedule sched;
  sched.satisfy_at.resize(n);
  Iteration tg = 0;
  if (spec.peripheral_last || spec.faults == FaultMode::persistent) {
    AgentId last = 0;
    for (AgentId i = 0; i < n; ++i) {
      if (g.eccentricity(i) == g.diameter()) {
        last = i;
        if (rng.chance(0.5)) break;
      }
    }
    tg = d + rng.between(spec.faults == FaultMode::persistent ? 40 : 1, 60);
    for (AgentId i = 0; i < n; ++i) sched.satisfy_at[i] = rng.between(1, std::max<Iteration>(1, tg - d));
    sched.satisfy_at[last] = tg;
  } else {
    for (AgentId i = 0; i < n; ++i) {
      sched.satisfy_at[i] = rng.between(1, 40);
      tg = std::max(tg, *sched.satisfy_at[i]);
    }
  }

  Scenario sc{g, spec.method, sched};
  sc.seed = seed;
  sc.flags.reduced_computation = spec.reduced_computation;

  std::set<AgentId> last;
  for (AgentId i = 0; i < n; ++i) {
    if (sched.satisfy_at[i] == tg) last.insert(i);
  }
  Iteration last_end = 0;
  if (spec.faults == FaultMode::random && n >= 2) {
    const auto cap = std::max<std::size_t>(1, static_cast<std::size_t>(spec.fault_density * double(n)));
    const bool stop_early = rng.chance(0.5);
    for (AgentId j : pick_faulty(rng, g, last, cap)) {
      FaultScript f;
      f.faulty_agent = j;
      if (rng.chance(0.5)) {
        std::vector<AgentId> others;
        for (AgentId k = 0; k < n; ++k) {
          if (k != j) others.push_back(k);
        }
        f.subjects = sample(rng, others, 1 + rng.below(std::min<std::size_t>(3, others.size())));
      }
      const auto bursts = rng.between(1, 4);
      for (std::int64_t b = 0; b < bursts; ++b) {
        const Iteration begin = rng.between(1, tg);
        Iteration end = begin + rng.between(1, 25);
        if (stop_early) end = std::min(end, tg + 1);
        f.active.emplace_back(begin, end);
        last_end = std::max(last_end, end);
      }
      std::sort(f.active.begin(), f.active.end());
      sc.faults.push_back(std::move(f));
    }
  } else if (spec.faults == FaultMode::persistent && n >= 2) {
    auto chosen = pick_faulty(rng, g, last, 1);
    if (!chosen.empty()) {
      FaultScript f;
      f.faulty_agent = chosen.front();
      f.subjects = {*last.begin()};
      f.active.emplace_back(rng.between(1, 10), tg + 1);
      last_end = tg + 1;
      sc.faults.push_back(std::move(f));
    }
  }

  const Iteration offset = spec.method == Method::basic ? d : ft_termination_offset(g.diameter(), n);
  sc.max_iterations = std::max(tg, last_end) + 3 * (offset + 1) + 10;
  return sc;
}

CampaignSummary run_campaign(const CampaignSpec& spec) {
  CampaignSummary summary;
  summary.runs.resize(spec.runs);

  auto one = [&](std::size_t index) {
    CampaignRun& row = summary.runs[index];
    Scenario sc = make_campaign_scenario(spec, index, &row.seed);
    auto val = validate(sc);
    RunOptions opts;
    // The latency check reads the trace; other checks only need the report.
    opts.record_trace = spec.method == Method::basic && sc.faults.empty();
    auto rep = run(sc, opts);
    row.index = index;
    row.agent_count = rep.agent_count;
    row.diameter = rep.diameter;
    row.faulty_count = rep.faulty_agents.size();
    row.global_satisfied = rep.global_satisfied;
    row.termination = rep.common_termination();
    row.max_single_persistence = rep.max_single_persistence;
    row.max_global_persistence = rep.max_global_persistence;
    row.fault_reports = rep.fault_reports.size();
    if (spec.reduced_computation && rep.all_terminated() && rep.global_satisfied) {
      row.savings = savings_fraction(rep);
    }
    row.checks = assert_propositions(rep, sc, val);
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(spec.threads, spec.runs));
  if (threads == 1) {
    for (std::size_t i = 0; i < spec.runs; ++i) one(i);
  } else {
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < spec.runs; i += threads) {
          try {
            one(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  for (const auto& row : summary.runs) {
    summary.max_single_persistence = std::max(summary.max_single_persistence, row.max_single_persistence);
    for (const auto& c : row.checks) {
      auto& t = summary.tally[c.id];
      if (c.verdict == Verdict::pass) ++t.pass;
      else if (c.verdict == Verdict::fail) ++t.fail;
      else ++t.skipped;
    }
  }
  return summary;
}

std::string format_summary(const CampaignSummary& s) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-26s %8s %8s %8s\n", "property", "pass", "fail", "skipped");
  out += line;
  for (const auto& [id, t] : s.tally) {
    std::snprintf(line, sizeof line, "%-26s %8zu %8zu %8zu\n", id.c_str(), t.pass, t.fail, t.skipped);
    out += line;
  }
  std::snprintf(line, sizeof line, "runs %zu, max single persistence %zu\n", s.runs.size(),
                s.max_single_persistence);
  out += line;
  return out;
}

}  // namespace dterm
