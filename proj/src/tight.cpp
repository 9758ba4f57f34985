#include "dterm/tight.hpp"

#include <algorithm>

#include "dterm/rng.hpp"
#include "dterm/sim.hpp"

namespace dterm {

namespace {
constexpr Iteration kProbeStart = 3;
}

Scenario persistence_probe(const CommGraph& graph, AgentId faulty, AgentId subject) {
  const std::size_t n = graph.agent_count();
  const std::size_t d = graph.diameter();
  Schedule sched;
  sched.satisfy_at.assign(n, Iteration{1});
  sched.satisfy_at[subject] = std::nullopt;

  FaultScript f;
  f.faulty_agent = faulty;
  f.subjects = {subject};
  const Iteration length = ft_termination_offset(d, n);
  f.active.emplace_back(kProbeStart, kProbeStart + length);

  Scenario sc{graph, Method::fault_tolerant, sched, {f}};
  sc.max_iterations = kProbeStart + 2 * length + 2;
  return sc;
}

std::optional<TightInstance> find_tight_instance(std::size_t n, std::size_t d, std::size_t budget,
                                                 std::uint64_t seed) {
  if (n < 3 || d == 0 || d >= n) return std::nullopt;
  const std::size_t target = d + n - 2;
  Rng rng(seed);
  RunOptions opts;
  opts.record_trace = false;

  std::vector<Edge> pairs;
  for (AgentId a = 0; a < n; ++a) {
    for (AgentId b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  }

  std::size_t runs = 0;
  std::size_t draws = 0;
  while (runs < budget && draws < 1000 * budget) {
    // Uniform edge subsets at a random density; the witnesses are cycle-like graphs
    // that structured generators rarely produce.
    ++draws;
    const double p = 0.15 + 0.5 * rng.unit();
    std::vector<Edge> edges;
    for (const auto& e : pairs) {
      if (rng.chance(p)) edges.push_back(e);
    }
    if (!is_connected(n, edges)) continue;
    CommGraph g(n, std::move(edges));
    if (g.diameter() != d) continue;
    for (AgentId j = 0; j < n && runs < budget; ++j) {
      if (g.is_cutset({j})) continue;
      for (AgentId k = 0; k < n && runs < budget; ++k) {
        if (k == j) continue;
        ++runs;
        Scenario sc = persistence_probe(g, j, k);
        auto rep = run(sc, opts);
        if (rep.max_single_persistence == target) {
          return TightInstance{std::move(sc), j, k, rep.max_single_persistence};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace dterm
