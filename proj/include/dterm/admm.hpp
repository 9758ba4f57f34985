#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "dterm/graph.hpp"
#include "dterm/types.hpp"

namespace dterm {

/// f(x) = 1/2 x' Q x + c' x with Q symmetric positive definite.
struct QuadraticObjective {
  Eigen::MatrixXd q;
  Eigen::VectorXd c;
};

/// One boundary variable duplicated on two neighboring agents.
struct SharedVariable {
  AgentId a = 0;
  std::size_t a_index = 0;
  AgentId b = 0;
  std::size_t b_index = 0;
};

struct AdmmProblem {
  std::vector<QuadraticObjective> agents;
  std::vector<SharedVariable> shared;
  double rho = 1.0;
  double tolerance = 1e-2;
};

/// Local view of one agent. `dual`, `consensus` and `neighbor_value` are indexed by the
/// agent's link list (see AdmmSystem::links).
struct AdmmAgentState {
  Eigen::VectorXd x;
  std::vector<double> dual;
  std::vector<double> consensus;
  std::vector<double> neighbor_value;
};

/// Edge-consensus ADMM over a CommGraph.
///
/// Each round: every active agent minimises its augmented local objective in closed
/// form (Cholesky factor cached at construction), boundary values are exchanged, and
/// each side of a shared variable averages the two copies and takes a scaled dual
/// step. Inactive agents keep their iterate and keep supplying it to neighbors.
class AdmmSystem {
 public:
  struct Link {
    std::size_t shared_id;
    std::size_t local_index;
    AgentId other;
    std::size_t other_index;
  };

  AdmmSystem(AdmmProblem problem, const CommGraph& graph);

  const AdmmProblem& problem() const noexcept { return problem_; }
  const std::vector<Link>& links(AgentId i) const { return links_.at(i); }
  std::size_t agent_count() const noexcept { return problem_.agents.size(); }

  /// Zero primal and dual start.
  std::vector<AdmmAgentState> initial_states() const;

  /// One synchronous round in place. Returns each agent's l-infinity mismatch between
  /// its shared values and the neighbor copies it just received.
  std::vector<double> step(std::vector<AdmmAgentState>& states,
                           const std::vector<std::uint8_t>& active) const;

 private:
  AdmmProblem problem_;
  std::vector<std::vector<Link>> links_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
};

struct AdmmStepResult {
  std::vector<AdmmAgentState> states;
  std::vector<double> mismatch;
};

/// Stateless form of one all-agents-active round.
AdmmStepResult admm_step(const AdmmProblem& problem, std::vector<AdmmAgentState> states,
                         const CommGraph& graph);

/// Random strictly convex consensus instance: one shared variable per graph edge plus
/// `private_vars` unshared variables per agent.
AdmmProblem make_random_consensus(const CommGraph& graph, std::uint64_t seed,
                                  std::size_t private_vars = 1, double rho = 1.0,
                                  double tolerance = 1e-2);

}  // namespace dterm
