#include "dterm/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "dterm/rng.hpp"

namespace dterm {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

std::vector<std::vector<AgentId>> build_adjacency(std::size_t n, std::span<const Edge> edges,
                                                  const std::vector<std::uint8_t>* removed) {
  std::vector<std::vector<AgentId>> adj(n);
  for (auto [a, b] : edges) {
    if (removed && ((*removed)[a] || (*removed)[b])) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

// Hop counts from `source`; kUnreached for vertices outside its component.
std::vector<std::uint32_t> bfs(const std::vector<std::vector<AgentId>>& adj, AgentId source) {
  std::vector<std::uint32_t> level(adj.size(), kUnreached);
  std::deque<AgentId> queue{source};
  level[source] = 0;
  while (!queue.empty()) {
    AgentId u = queue.front();
    queue.pop_front();
    for (AgentId w : adj[u]) {
      if (level[w] == kUnreached) {
        level[w] = level[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return level;
}

std::vector<Edge> normalise(std::size_t n, std::vector<Edge> edges) {
  for (auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw ValidationError("", "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                    ") references an agent outside [0, " + std::to_string(n) +
                                    ")");
    }
    if (a == b) throw ValidationError("", "self-loop on agent " + std::to_string(a));
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw ValidationError("", "duplicate edge (" + std::to_string(dup->first) + ", " +
                                  std::to_string(dup->second) + ")");
  }
  return edges;
}

}  // namespace

CommGraph::CommGraph(std::size_t agent_count, std::vector<Edge> edges)
    : agent_count_(agent_count) {
  if (agent_count == 0) throw ValidationError("", "a communication graph needs at least one agent");
  edges_ = normalise(agent_count, std::move(edges));
  adjacency_ = build_adjacency(agent_count, edges_, nullptr);

  dist_.assign(agent_count * agent_count, 0);
  for (AgentId s = 0; s < agent_count; ++s) {
    auto level = bfs(adjacency_, s);
    for (AgentId t = 0; t < agent_count; ++t) {
      if (level[t] == kUnreached) {
        throw ValidationError("A1", "communication graph is disconnected (agent " +
                                        std::to_string(t) + " unreachable from agent " +
                                        std::to_string(s) + ")");
      }
      dist_[s * agent_count + t] = level[t];
      diameter_ = std::max<std::size_t>(diameter_, level[t]);
    }
  }
}

void CommGraph::check_id(AgentId i) const {
  if (i >= agent_count_) {
    throw ContractError("agent id " + std::to_string(i) + " out of range [0, " +
                        std::to_string(agent_count_) + ")");
  }
}

std::span<const AgentId> CommGraph::neighbors(AgentId i) const {
  check_id(i);
  return adjacency_[i];
}

std::size_t CommGraph::distance(AgentId i, AgentId j) const {
  check_id(i);
  check_id(j);
  return dist_[i * agent_count_ + j];
}

std::size_t CommGraph::eccentricity(AgentId i) const {
  check_id(i);
  auto row = std::span(dist_).subspan(i * agent_count_, agent_count_);
  return *std::max_element(row.begin(), row.end());
}

bool CommGraph::is_cutset(const std::set<AgentId>& removed) const {
  for (AgentId a : removed) check_id(a);
  if (removed.size() >= agent_count_) {
    throw ContractError("cut-set query must leave at least one agent");
  }
  if (agent_count_ - removed.size() <= 1) return false;

  std::vector<std::uint8_t> gone(agent_count_, 0);
  for (AgentId a : removed) gone[a] = 1;
  auto adj = build_adjacency(agent_count_, edges_, &gone);
  AgentId start = 0;
  while (gone[start]) ++start;
  auto level = bfs(adj, start);
  for (AgentId v = 0; v < agent_count_; ++v) {
    if (!gone[v] && level[v] == kUnreached) return true;
  }
  return false;
}

bool is_connected(std::size_t agent_count, std::span<const Edge> edges) {
  if (agent_count == 0) return false;
  for (auto [a, b] : edges) {
    if (a >= agent_count || b >= agent_count) return false;
  }
  auto level = bfs(build_adjacency(agent_count, edges, nullptr), 0);
  return std::none_of(level.begin(), level.end(), [](auto l) { return l == kUnreached; });
}

CommGraph make_path(std::size_t n) {
  if (n == 0) throw ContractError("path needs n >= 1");
  std::vector<Edge> edges;
  for (AgentId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return CommGraph(n, std::move(edges));
}

CommGraph make_ring(std::size_t n) {
  if (n < 3) throw ContractError("ring needs n >= 3");
  std::vector<Edge> edges;
  for (AgentId i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return CommGraph(n, std::move(edges));
}

CommGraph make_star(std::size_t n) {
  if (n == 0) throw ContractError("star needs n >= 1");
  std::vector<Edge> edges;
  for (AgentId i = 1; i < n; ++i) edges.emplace_back(0, i);
  return CommGraph(n, std::move(edges));
}

CommGraph make_complete(std::size_t n) {
  if (n == 0) throw ContractError("complete graph needs n >= 1");
  std::vector<Edge> edges;
  for (AgentId i = 0; i < n; ++i) {
    for (AgentId j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return CommGraph(n, std::move(edges));
}

CommGraph make_random_connected(std::uint64_t seed, std::size_t n, double edge_prob) {
  if (n == 0) throw ContractError("random_connected needs n >= 1");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw ContractError("random_connected needs edge_prob in (0, 1]");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (AgentId i = 0; i < n; ++i) {
    for (AgentId j = i + 1; j < n; ++j) {
      if (rng.chance(edge_prob)) edges.emplace_back(i, j);
    }
  }

  // Bridge components: label them, then join each to a random earlier one.
  std::vector<AgentId> parent(n);
  std::iota(parent.begin(), parent.end(), AgentId{0});
  auto find = [&](AgentId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  std::vector<std::vector<AgentId>> members(n);
  for (AgentId v = 0; v < n; ++v) members[find(v)].push_back(v);
  std::vector<std::vector<AgentId>> comps;
  for (auto& m : members) {
    if (!m.empty()) comps.push_back(std::move(m));
  }
  for (std::size_t c = 1; c < comps.size(); ++c) {
    const auto& target = comps[rng.below(c)];
    AgentId a = comps[c][rng.below(comps[c].size())];
    AgentId b = target[rng.below(target.size())];
    edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return CommGraph(n, std::move(edges));
}

CommGraph make_with_diameter(std::uint64_t seed, std::size_t n, std::size_t diameter,
                             std::size_t edge_count, int attempts) {
  if (n == 0) throw ContractError("with_diameter needs n >= 1");
  if (diameter >= n || (n > 1 && diameter == 0)) {
    throw ContractError("diameter " + std::to_string(diameter) + " impossible for " +
                        std::to_string(n) + " agents");
  }
  if (n == 1) return CommGraph(1, {});

  Rng rng(seed);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<AgentId> label(n);
    std::iota(label.begin(), label.end(), AgentId{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(label[i], label[rng.below(i + 1)]);

    // Backbone path realises the diameter; the remaining agents hang off interior
    // backbone vertices (or previously attached agents) to keep it from growing.
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < diameter; ++i) edges.emplace_back(label[i], label[i + 1]);
    std::vector<AgentId> placed(label.begin(), label.begin() + static_cast<long>(diameter) + 1);
    for (std::size_t i = diameter + 1; i < n; ++i) {
      AgentId anchor = placed[rng.below(placed.size())];
      edges.emplace_back(anchor, label[i]);
      placed.push_back(label[i]);
    }

    auto adj = build_adjacency(n, edges, nullptr);
    std::vector<std::vector<std::uint32_t>> dist(n);
    for (AgentId s = 0; s < n; ++s) dist[s] = bfs(adj, s);

    // Chords between agents two hops apart shorten paths by at most one hop.
    std::size_t guard = 0;
    while (edges.size() < edge_count && guard++ < 50 * n * n) {
      AgentId a = rng.below(n), b = rng.below(n);
      if (a == b || dist[a][b] != 2) continue;
      edges.emplace_back(a, b);
      adj[a].push_back(b);
      adj[b].push_back(a);
      for (AgentId s = 0; s < n; ++s) dist[s] = bfs(adj, s);
    }

    std::size_t d = 0;
    for (AgentId s = 0; s < n; ++s) {
      for (AgentId t = 0; t < n; ++t) d = std::max<std::size_t>(d, dist[s][t]);
    }
    if (d == diameter && (edge_count == 0 || edges.size() == std::max(edge_count, n - 1))) {
      return CommGraph(n, std::move(edges));
    }
  }
  throw ContractError("no graph with " + std::to_string(n) + " agents and diameter " +
                      std::to_string(diameter) + " found within the attempt budget");
}

CommGraph make_topology(const TopologySpec& spec) {
  if (spec.kind == "path") return make_path(spec.n);
  if (spec.kind == "ring") return make_ring(spec.n);
  if (spec.kind == "star") return make_star(spec.n);
  if (spec.kind == "complete") return make_complete(spec.n);
  if (spec.kind == "random_connected") {
    return make_random_connected(spec.seed, spec.n, spec.edge_prob);
  }
  if (spec.kind == "with_diameter") {
    return make_with_diameter(spec.seed, spec.n, spec.diameter, spec.edge_count);
  }
  throw ContractError("unknown topology kind '" + spec.kind + "'");
}

}  // namespace dterm
