#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dterm/types.hpp"

namespace dterm {

using Edge = std::pair<AgentId, AgentId>;

/// Undirected, simple, connected communication network.
///
/// Construction validates the edge list and rejects disconnected graphs, so every
/// CommGraph satisfies the connectivity assumption the termination rules rely on.
/// All-pairs hop distances are computed once (one breadth-first search per source)
/// and the object is immutable afterwards, which makes it safe to share across
/// threads evaluating agents concurrently.
class CommGraph {
 public:
  CommGraph(std::size_t agent_count, std::vector<Edge> edges);

  std::size_t agent_count() const noexcept { return agent_count_; }

  /// Edges normalised to (low, high) and sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Sorted neighbor list of `i`, never containing `i` itself.
  std::span<const AgentId> neighbors(AgentId i) const;

  std::size_t distance(AgentId i, AgentId j) const;
  std::size_t diameter() const noexcept { return diameter_; }
  std::size_t eccentricity(AgentId i) const;

  /// True iff removing `removed` leaves a disconnected remainder with at least two agents.
  bool is_cutset(const std::set<AgentId>& removed) const;

  bool operator==(const CommGraph& other) const {
    return agent_count_ == other.agent_count_ && edges_ == other.edges_;
  }

 private:
  void check_id(AgentId i) const;

  std::size_t agent_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentId>> adjacency_;
  std::vector<std::uint32_t> dist_;  // row-major agent_count x agent_count
  std::size_t diameter_ = 0;
};

/// Connectivity test on a raw edge list; does not require the graph to be valid otherwise.
bool is_connected(std::size_t agent_count, std::span<const Edge> edges);

// Topology generators. All are deterministic for fixed parameters.

CommGraph make_path(std::size_t n);
CommGraph make_ring(std::size_t n);
CommGraph make_star(std::size_t n);
CommGraph make_complete(std::size_t n);

/// Erdos-Renyi G(n, p); disconnected draws are augmented with bridging edges
/// between components until connected.
CommGraph make_random_connected(std::uint64_t seed, std::size_t n, double edge_prob);

/// Random connected graph with exactly `diameter` and (when achievable) `edge_count`
/// edges. Retries up to `attempts` times; throws ContractError if none matches.
CommGraph make_with_diameter(std::uint64_t seed, std::size_t n, std::size_t diameter,
                             std::size_t edge_count, int attempts = 2000);

/// Generator addressed by name, as used by scenario files and the CLI.
struct TopologySpec {
  std::string kind;  // path | ring | star | complete | random_connected | with_diameter
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double edge_prob = 0.0;
  std::size_t diameter = 0;
  std::size_t edge_count = 0;
};

CommGraph make_topology(const TopologySpec& spec);

}  // namespace dterm
