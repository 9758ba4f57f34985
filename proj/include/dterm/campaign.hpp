#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dterm/metrics.hpp"
#include "dterm/scenario.hpp"

namespace dterm {

enum class FaultMode {
  none,
  random,      // random bursts from random non-cut-set injectors, last satisfiers excluded
  persistent,  // one injector claims the last satisfier until the global criterion holds
};

FaultMode fault_mode_from_string(const std::string& s);
std::string to_string(FaultMode m);

struct CampaignSpec {
  Method method = Method::basic;
  std::size_t n_min = 2;
  std::size_t n_max = 20;
  std::vector<std::string> kinds{"random_connected"};
  std::size_t runs = 200;
  std::uint64_t seed = 1;
  FaultMode faults = FaultMode::none;
  double fault_density = 0.2;  // upper bound on the share of scripted agents
  bool reduced_computation = false;
  bool peripheral_last = false;  // single last satisfier at eccentricity D
  std::size_t threads = 1;       // scenarios evaluated concurrently
};

struct CampaignRun {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t agent_count = 0;
  std::size_t diameter = 0;
  std::size_t faulty_count = 0;
  std::optional<Iteration> global_satisfied;
  std::optional<Iteration> termination;  // common termination, if any
  std::size_t max_single_persistence = 0;
  std::size_t max_global_persistence = 0;
  std::size_t fault_reports = 0;
  std::optional<double> savings;  // reduced-computation runs that terminated
  std::vector<PropositionCheck> checks;
};

struct Tally {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skipped = 0;
};

struct CampaignSummary {
  std::vector<CampaignRun> runs;
  std::map<std::string, Tally> tally;
  std::size_t max_single_persistence = 0;

  bool ok() const;
};

/// Scenario number `index` of the campaign; `run_seed` receives its derived seed.
Scenario make_campaign_scenario(const CampaignSpec& spec, std::size_t index,
                                std::uint64_t* run_seed = nullptr);

CampaignSummary run_campaign(const CampaignSpec& spec);

/// Fixed-width table, one row per checked property.
std::string format_summary(const CampaignSummary& summary);

}  // namespace dterm
