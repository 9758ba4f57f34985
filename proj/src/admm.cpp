#include "dterm/admm.hpp"

#include <algorithm>
#include <cmath>

#include "dterm/rng.hpp"

namespace dterm {

AdmmSystem::AdmmSystem(AdmmProblem problem, const CommGraph& graph)
    : problem_(std::move(problem)) {
  const std::size_t n = problem_.agents.size();
  if (n != graph.agent_count()) {
    throw ValidationError("", "ADMM problem has " + std::to_string(n) + " agents, graph has " +
                                  std::to_string(graph.agent_count()));
  }
  if (!(problem_.rho > 0.0)) throw ValidationError("", "ADMM penalty rho must be positive");
  if (!(problem_.tolerance > 0.0)) throw ValidationError("", "mismatch tolerance must be positive");

  links_.assign(n, {});
  for (std::size_t s = 0; s < problem_.shared.size(); ++s) {
    const auto& sv = problem_.shared[s];
    if (sv.a >= n || sv.b >= n || sv.a == sv.b) {
      throw ValidationError("", "shared variable " + std::to_string(s) + " needs two distinct owners");
    }
    if (sv.a_index >= static_cast<std::size_t>(problem_.agents[sv.a].c.size()) ||
        sv.b_index >= static_cast<std::size_t>(problem_.agents[sv.b].c.size())) {
      throw ValidationError("", "shared variable " + std::to_string(s) + " index out of range");
    }
    auto nb = graph.neighbors(sv.a);
    if (!std::binary_search(nb.begin(), nb.end(), sv.b)) {
      throw ValidationError("", "shared variable " + std::to_string(s) + " couples non-adjacent agents " +
                                    std::to_string(sv.a) + " and " + std::to_string(sv.b));
    }
    links_[sv.a].push_back({s, sv.a_index, sv.b, sv.b_index});
    links_[sv.b].push_back({s, sv.b_index, sv.a, sv.a_index});
  }
  for (AgentId i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < links_[i].size(); ++l) {
      for (std::size_t m = l + 1; m < links_[i].size(); ++m) {
        if (links_[i][l].local_index == links_[i][m].local_index) {
          throw ValidationError("", "agent " + std::to_string(i) + " local variable " +
                                        std::to_string(links_[i][l].local_index) +
                                        " is shared more than once");
        }
      }
    }
  }

  factors_.reserve(n);
  for (AgentId i = 0; i < n; ++i) {
    const auto& obj = problem_.agents[i];
    if (obj.q.rows() != obj.q.cols() || obj.q.rows() != obj.c.size() || obj.c.size() == 0) {
      throw ValidationError("", "agent " + std::to_string(i) + " objective has inconsistent shape");
    }
    Eigen::LLT<Eigen::MatrixXd> plain(obj.q);
    if (plain.info() != Eigen::Success || !obj.q.isApprox(obj.q.transpose())) {
      throw ValidationError("", "agent " + std::to_string(i) + " objective is not positive definite");
    }
    Eigen::MatrixXd h = obj.q;
    for (const auto& link : links_[i]) h(link.local_index, link.local_index) += problem_.rho;
    factors_.emplace_back(h);
  }
}

std::vector<AdmmAgentState> AdmmSystem::initial_states() const {
  std::vector<AdmmAgentState> states(agent_count());
  for (AgentId i = 0; i < agent_count(); ++i) {
    const auto nl = links_[i].size();
    states[i].x = Eigen::VectorXd::Zero(problem_.agents[i].c.size());
    states[i].dual.assign(nl, 0.0);
    states[i].consensus.assign(nl, 0.0);
    states[i].neighbor_value.assign(nl, 0.0);
  }
  return states;
}

std::vector<double> AdmmSystem::step(std::vector<AdmmAgentState>& states,
                                     const std::vector<std::uint8_t>& active) const {
  const std::size_t n = agent_count();
  const double rho = problem_.rho;

  for (AgentId i = 0; i < n; ++i) {
    if (!active[i]) continue;
    Eigen::VectorXd rhs = -problem_.agents[i].c;
    for (std::size_t l = 0; l < links_[i].size(); ++l) {
      rhs(links_[i][l].local_index) += rho * (states[i].consensus[l] - states[i].dual[l]);
    }
    states[i].x = factors_[i].solve(rhs);
  }

  for (AgentId i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < links_[i].size(); ++l) {
      const auto& link = links_[i][l];
      states[i].neighbor_value[l] = states[link.other].x(link.other_index);
    }
  }

  std::vector<double> mismatch(n, 0.0);
  for (AgentId i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < links_[i].size(); ++l) {
      const double own = states[i].x(links_[i][l].local_index);
      const double theirs = states[i].neighbor_value[l];
      mismatch[i] = std::max(mismatch[i], std::abs(own - theirs));
      if (!active[i]) continue;
      states[i].consensus[l] = 0.5 * (own + theirs);
      states[i].dual[l] += own - states[i].consensus[l];
    }
  }
  return mismatch;
}

AdmmStepResult admm_step(const AdmmProblem& problem, std::vector<AdmmAgentState> states,
                         const CommGraph& graph) {
  AdmmSystem system(problem, graph);
  std::vector<std::uint8_t> active(system.agent_count(), 1);
  auto mismatch = system.step(states, active);
  return {std::move(states), std::move(mismatch)};
}

AdmmProblem make_random_consensus(const CommGraph& graph, std::uint64_t seed,
                                  std::size_t private_vars, double rho, double tolerance) {
  Rng rng(seed);
  const std::size_t n = graph.agent_count();
  std::vector<std::size_t> slots(n, 0);
  AdmmProblem problem;
  problem.rho = rho;
  problem.tolerance = tolerance;
  for (auto [a, b] : graph.edges()) {
    problem.shared.push_back({a, slots[a]++, b, slots[b]++});
  }
  problem.agents.resize(n);
  for (AgentId i = 0; i < n; ++i) {
    const auto dim = static_cast<Eigen::Index>(slots[i] + private_vars);
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = 2.0 * rng.unit() - 1.0;
    }
    problem.agents[i].q = m * m.transpose() / static_cast<double>(dim) +
                          Eigen::MatrixXd::Identity(dim, dim);
    problem.agents[i].c.resize(dim);
    for (Eigen::Index r = 0; r < dim; ++r) problem.agents[i].c(r) = 4.0 * rng.unit() - 2.0;
  }
  return problem;
}

}  // namespace dterm
