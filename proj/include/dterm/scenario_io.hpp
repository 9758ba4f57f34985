#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dterm/metrics.hpp"
#include "dterm/scenario.hpp"
#include "dterm/sim.hpp"

namespace dterm {

inline constexpr int kScenarioVersion = 1;

/// Unreadable or unwritable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a YAML scenario. Errors are ValidationError with "origin:line:" positions.
/// `seed_override` replaces the document's seed before generated graphs or problems
/// are built from it.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>",
                        std::optional<std::uint64_t> seed_override = std::nullopt);

Scenario load_scenario(const std::string& path,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// YAML form that parse_scenario reads back to an equal scenario (graphs and ADMM
/// problems are written out explicitly).
std::string dump_scenario(const Scenario& scenario);

/// Graph literal (agent_count plus edge list) as a YAML document.
std::string dump_graph(const CommGraph& graph);

std::string report_json(const RunReport& report, const ValidationReport& validation,
                        const std::vector<PropositionCheck>& checks);

/// iteration,local,full,terminated
std::string series_csv(const RunReport& report);

void write_file(const std::string& path, const std::string& contents);

}  // namespace dterm
