// One line per acceptance criterion; exits non-zero when any of them fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "dterm/campaign.hpp"
#include "dterm/metrics.hpp"
#include "dterm/sim.hpp"
#include "dterm/tight.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dterm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  failures += !o.pass;
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

CampaignSpec sweep(Method m) {
  CampaignSpec s;
  s.method = m;
  s.n_min = 1;
  s.n_max = 30;
  s.kinds = {"random_connected", "path", "ring", "star", "complete"};
  s.runs = 250;
  s.seed = 2024;
  return s;
}

CampaignSpec fault_sweep(FaultMode mode, std::size_t runs, std::uint64_t seed) {
  CampaignSpec s;
  s.method = Method::fault_tolerant;
  s.n_min = 3;
  s.n_max = 30;
  s.kinds = {"random_connected", "ring", "path", "with_diameter"};
  s.runs = runs;
  s.seed = seed;
  s.faults = mode;
  s.fault_density = 0.35;
  return s;
}

// Every run terminated in common at exactly T_G + offset(D, n).
Outcome exact_sweep(const CampaignSummary& s, const std::string& check,
                    const std::function<Iteration(const CampaignRun&)>& offset) {
  std::size_t bad = 0;
  for (const auto& r : s.runs) {
    if (!r.global_satisfied || !r.termination || *r.termination != *r.global_satisfied + offset(r)) ++bad;
  }
  std::ostringstream os;
  const auto& t = s.tally.at(check);
  os << s.runs.size() << " runs, " << bad << " not at T_G + offset, " << t.fail << " failed and " << t.skipped
     << " skipped " << check << " checks";
  return {bad == 0 && s.runs.size() >= 200 && t.fail == 0 && t.skipped == 0, os.str()};
}

Iteration ft_offset(const CampaignRun& r) { return 2 * Iteration(r.diameter) + Iteration(r.agent_count) - 1; }

std::string trace_bytes(const Scenario& sc) {
  auto rep = run(sc);
  return serialize_trace(rep.trace, TraceFormat::csv) + serialize_trace(rep.trace, TraceFormat::jsonl);
}

double max_deviation(const std::vector<Eigen::VectorXd>& got, const std::vector<Eigen::VectorXd>& want) {
  double worst = 0;
  for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, (got.at(i) - want[i]).lpNorm<Eigen::Infinity>());
  return worst;
}

}  // namespace

int main() {
  report(1, "basic method terminates exactly at T_G + D", [] {
    return exact_sweep(run_campaign(sweep(Method::basic)), "exact-termination", [](const CampaignRun& r) { return Iteration(r.diameter); });
  });

  report(2, "22-agent basic run terminates at 869", [] {
    auto sc = fixture::twenty_two_scenario(Method::basic);
    auto rep = run(sc);
    std::ostringstream os;
    os << "D " << rep.diameter << ", T_G " << rep.global_satisfied.value_or(-1) << ", termination "
       << rep.common_termination().value_or(-1);
    return Outcome{rep.diameter == 7 && rep.global_satisfied == 862 && rep.common_termination() == 869, os.str()};
  });

  report(3, "22-agent fault-tolerant runs terminate at 897", [] {
    bool ok = true;
    std::ostringstream os;
    for (const auto& row : fixture::faulty_rows()) {
      auto sc = fixture::twenty_two_scenario(Method::fault_tolerant, row);
      RunOptions opts;
      opts.record_trace = false;
      auto rep = run(sc, opts);
      ok = ok && rep.common_termination() == 897 && rep.max_single_persistence > 0 &&
           rep.max_single_persistence <= 27;
      os << (row == fixture::faulty_rows().front() ? "" : "; ") << row.size() << " faulty: "
         << rep.common_termination().value_or(-1) << " (persistence " << rep.max_single_persistence << "/"
         << rep.max_global_persistence << ")";
    }
    return Outcome{ok, os.str()};
  });

  report(4, "persistence never exceeds D + n - 2 and the bound is reached", [] {
    std::size_t runs = 0, over = 0;
    for (auto spec : {fault_sweep(FaultMode::random, 400, 7), fault_sweep(FaultMode::persistent, 200, 8)}) {
      for (const auto& r : run_campaign(spec).runs) {
        ++runs;
        const std::size_t bound = r.diameter + r.agent_count - 2;
        if (r.max_single_persistence > bound) ++over;
      }
    }
    auto tight = find_tight_instance(7, 3, 20000, 1);
    std::size_t cut_parts = 0;
    if (tight) {
      const auto& g = tight->scenario.graph;
      cut_parts = oracle::components_without(g.agent_count(), g.edges(), {tight->faulty});
    }
    std::ostringstream os;
    os << runs << " fault runs, " << over << " over the bound; tight (7, 3) persistence "
       << (tight ? std::to_string(tight->persistence) : "none");
    return Outcome{runs >= 500 && over == 0 && tight && tight->persistence == 8 && cut_parts == 1, os.str()};
  });

  report(5, "no agent terminates before T_G under faults", [] {
    std::size_t runs = 0, early = 0, skipped = 0, failed = 0;
    for (auto spec : {fault_sweep(FaultMode::random, 400, 11), fault_sweep(FaultMode::persistent, 200, 12)}) {
      auto s = run_campaign(spec);
      for (const auto& r : s.runs) {
        ++runs;
        if (r.termination && r.global_satisfied && *r.termination < *r.global_satisfied) ++early;
      }
      skipped += s.tally.at("no-early-termination").skipped;
      failed += s.tally.at("no-early-termination").fail;
    }
    std::ostringstream os;
    os << runs << " runs, " << early << " early, " << failed << " failed, " << skipped << " skipped";
    return Outcome{runs >= 500 && early == 0 && failed == 0 && skipped == 0, os.str()};
  });

  report(6, "fault-tolerant method without faults terminates at T_G + 2D + n - 1", [] {
    auto s = run_campaign(sweep(Method::fault_tolerant));
    std::size_t reports = 0;
    for (const auto& r : s.runs) reports += r.fault_reports;
    auto o = exact_sweep(s, "appropriate-termination", ft_offset);
    o.detail += ", " + std::to_string(reports) + " fault reports";
    o.pass = o.pass && reports == 0;
    return o;
  });

  report(7, "reduced computation skips (D + n - 1) / (2D + n - 1) of the rounds", [] {
    CampaignSpec s = sweep(Method::fault_tolerant);
    s.n_min = 2;
    s.runs = 200;
    s.seed = 77;
    s.reduced_computation = true;
    s.peripheral_last = true;
    std::size_t off = 0, below = 0;
    double lowest = 1;
    auto summary = run_campaign(s);
    for (const auto& r : summary.runs) {
      const double want = expected_savings(r.diameter, r.agent_count);
      const double granularity = 1.0 / double(2 * r.diameter + r.agent_count - 1);
      if (!r.savings || std::abs(*r.savings - want) > granularity + 1e-12) ++off;
      if (!r.savings || *r.savings < 2.0 / 3.0 - 1e-12) ++below;
      if (r.savings) lowest = std::min(lowest, *r.savings);
    }
    std::ostringstream os;
    os << summary.runs.size() << " runs, " << off << " off the formula, " << below << " below 2/3, lowest "
       << lowest;
    return Outcome{off == 0 && below == 0 && !summary.runs.empty(), os.str()};
  });

  report(8, "fault reports name only faulty agents", [] {
    auto s = run_campaign(fault_sweep(FaultMode::persistent, 300, 21));
    std::size_t reports = 0;
    for (const auto& r : s.runs) reports += r.fault_reports;
    const auto& t = s.tally.at("detector-soundness");
    std::size_t clean_reports = 0, clean_runs = 0;
    auto clean = run_campaign(sweep(Method::fault_tolerant));
    for (const auto& r : clean.runs) {
      ++clean_runs;
      clean_reports += r.fault_reports;
    }
    std::ostringstream os;
    os << s.runs.size() << " injector runs with " << reports << " reports, " << t.fail
       << " naming an honest agent; " << clean_runs << " fault-free runs with " << clean_reports << " reports";
    return Outcome{t.fail == 0 && t.skipped == 0 && reports > 0 && clean_reports == 0, os.str()};
  });

  report(9, "22-agent ADMM terminates under both methods and matches the pooled solve", [] {
    const auto g = make_random_connected(5, 22, 0.15);
    std::ostringstream os;
    bool ok = true;
    for (auto m : {Method::basic, Method::fault_tolerant}) {
      Scenario sc(g, m, AdmmCriterion{make_random_consensus(g, 5, 1), true});
      sc.max_iterations = 3000;
      auto rep = run(sc);
      auto checks = assert_propositions(rep, sc, validate(sc));
      const Iteration offset = m == Method::basic ? Iteration(rep.diameter)
                                                  : 2 * Iteration(rep.diameter) + Iteration(rep.agent_count) - 1;
      const bool fine = rep.global_satisfied && rep.common_termination() == *rep.global_satisfied + offset &&
                        !any_failed(checks);
      ok = ok && fine;
      os << to_string(m) << " T_G " << rep.global_satisfied.value_or(-1) << " -> "
         << rep.common_termination().value_or(-1) << " (deviation "
         << max_deviation(rep.solution, oracle::pooled_solve(std::get<AdmmCriterion>(sc.criterion).problem))
         << "); ";
    }
    // Same problem and protocol run to a tolerance fine enough for the 1e-6 comparison.
    auto tight = make_random_consensus(g, 5, 1, 1.0, 1e-9);
    const auto pooled = oracle::pooled_solve(tight);
    double worst = 0;
    for (auto m : {Method::basic, Method::fault_tolerant}) {
      Scenario sc(g, m, AdmmCriterion{tight, true});
      sc.max_iterations = 20000;
      auto rep = run(sc, RunOptions{nullptr, TraceFormat::csv, false});
      if (!rep.all_terminated()) ok = false;
      worst = std::max(worst, max_deviation(rep.solution, pooled));
    }
    os << "at tolerance 1e-9 max deviation " << worst;
    return Outcome{ok && worst <= 1e-6, os.str()};
  });

  report(10, "parallel and serial traces are byte-identical", [] {
    std::vector<Scenario> cases{fixture::twenty_two_scenario(Method::fault_tolerant, {1, 3, 4, 9, 14}),
                                fixture::twenty_two_scenario(Method::basic)};
    const auto g = make_random_connected(5, 22, 0.15);
    Scenario admm(g, Method::fault_tolerant, AdmmCriterion{make_random_consensus(g, 5, 1), true});
    admm.max_iterations = 200;
    admm.flags.reduced_computation = true;
    cases.push_back(admm);
    auto spec = fault_sweep(FaultMode::random, 0, 31);
    for (std::size_t i = 0; i < 20; ++i) cases.push_back(make_campaign_scenario(spec, i));
    std::size_t differing = 0;
    for (auto sc : cases) {
      sc.threads = 1;
      const auto serial = trace_bytes(sc);
      for (std::size_t t : {2u, 4u, 7u}) {
        sc.threads = t;
        differing += trace_bytes(sc) != serial;
      }
    }
    std::ostringstream os;
    os << cases.size() << " scenarios x 3 thread counts, " << differing << " differing traces";
    return Outcome{differing == 0, os.str()};
  });

  return failures == 0 ? 0 : 1;
}
