#include <gtest/gtest.h>

#include <cmath>

#include "dterm/admm.hpp"
#include "dterm/schedule.hpp"
#include "dterm/sim.hpp"
#include "oracles.hpp"

using namespace dterm;

namespace {

AdmmProblem two_agent(double a, double b) {
  // (x - a)^2 and (x - b)^2 up to constants.
  AdmmProblem p;
  p.agents.push_back({Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -2 * a)});
  p.agents.push_back({Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -2 * b)});
  p.shared.push_back({0, 0, 1, 0});
  return p;
}

}  // namespace

TEST(Schedule, Bits) {
  Schedule s{{5, std::nullopt}, {}};
  EXPECT_FALSE(schedule_bit(s, 0, 4));
  EXPECT_TRUE(schedule_bit(s, 0, 5));
  for (Iteration t = 0; t < 100; ++t) EXPECT_FALSE(schedule_bit(s, 1, t));
  EXPECT_THROW(schedule_bit(s, 2, 1), ContractError);

  s.overrides.push_back({0, 7, false});
  std::string bits;
  for (Iteration t = 1; t <= 9; ++t) bits += schedule_bit(s, 0, t) ? '1' : '0';
  EXPECT_EQ(bits, "000011011");
  EXPECT_FALSE(is_monotone(s));
  EXPECT_TRUE(is_monotone(Schedule{{5, std::nullopt, 1}, {}}));

  s.overrides.push_back({0, 7, true});
  EXPECT_TRUE(schedule_bit(s, 0, 7));
}

TEST(Schedule, Matrix) {
  auto rows = schedule_matrix(Schedule{{1, 3}, {}}, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (StatusBits{1, 0}));
  EXPECT_EQ(rows[2], (StatusBits{1, 1}));
}

TEST(Criterion, Admm) {
  EXPECT_TRUE(admm_criterion(0.009, 0.01, false, false));
  EXPECT_TRUE(admm_criterion(0.011, 0.01, true, true));
  EXPECT_FALSE(admm_criterion(0.011, 0.01, false, true));
  EXPECT_FALSE(admm_criterion(0.01, 0.01, false, false));
  // Latched criterion never drops whatever the mismatch does.
  bool prev = false;
  for (int t = 0; t < 50; ++t) {
    bool next = admm_criterion(t % 3 == 0 ? 0.001 : 1.0, 0.01, true, prev);
    EXPECT_GE(next, prev);
    prev = next;
  }
}

TEST(Admm, TwoAgentConsensus) {
  const double a = 3.0, b = -1.0;
  AdmmSystem sys(two_agent(a, b), make_path(2));
  auto st = sys.initial_states();
  std::vector<std::uint8_t> active(2, 1);
  std::vector<double> mm;
  for (int t = 0; t < 200; ++t) mm.push_back(sys.step(st, active)[0]);
  EXPECT_NEAR(st[0].x(0), (a + b) / 2, 1e-6);
  EXPECT_NEAR(st[1].x(0), (a + b) / 2, 1e-6);
  // Geometric decay after the transient.
  EXPECT_LT(mm[40], 0.5 * mm[20]);
  EXPECT_LT(mm[60], 0.5 * mm[40]);
  EXPECT_LT(mm.back(), 1e-9);
}

TEST(Admm, StatelessStepMatchesSystem) {
  auto p = two_agent(1.0, 2.0);
  AdmmSystem sys(p, make_path(2));
  auto st = sys.initial_states();
  auto r = admm_step(p, sys.initial_states(), make_path(2));
  auto mm = sys.step(st, {1, 1});
  EXPECT_EQ(r.mismatch, mm);
  EXPECT_EQ(r.states[0].x, st[0].x);
}

TEST(Admm, ZeroLinearTermsStayAtZero) {
  auto g = make_ring(5);
  auto p = make_random_consensus(g, 4);
  for (auto& a : p.agents) a.c.setZero();
  AdmmSystem sys(p, g);
  auto st = sys.initial_states();
  std::vector<std::uint8_t> active(5, 1);
  for (int t = 0; t < 10; ++t) {
    for (double m : sys.step(st, active)) EXPECT_EQ(m, 0.0);
  }
  for (const auto& s : st) EXPECT_EQ(s.x.norm(), 0.0);
}

TEST(Admm, MatchesPooledSolve) {
  auto g = make_random_connected(5, 22, 0.15);
  auto p = make_random_consensus(g, 5);
  AdmmSystem sys(p, g);
  auto st = sys.initial_states();
  std::vector<std::uint8_t> active(22, 1);
  double mm = 1;
  for (int t = 0; t < 5000 && mm > 1e-12; ++t) {
    auto v = sys.step(st, active);
    mm = *std::max_element(v.begin(), v.end());
  }
  auto ref = oracle::pooled_solve(p);
  for (AgentId i = 0; i < 22; ++i) EXPECT_LT((st[i].x - ref[i]).lpNorm<Eigen::Infinity>(), 1e-6) << i;
}

TEST(Admm, InactiveAgentsKeepTheirIterate) {
  auto g = make_path(3);
  AdmmSystem sys(make_random_consensus(g, 2), g);
  auto st = sys.initial_states();
  sys.step(st, {1, 1, 1});
  auto frozen = st[1];
  sys.step(st, {1, 0, 1});
  EXPECT_EQ(st[1].x, frozen.x);
  EXPECT_EQ(st[1].dual, frozen.dual);
  EXPECT_EQ(st[0].neighbor_value[0], frozen.x(sys.links(0)[0].other_index));
}

TEST(Admm, Validation) {
  auto g = make_path(3);
  auto p = make_random_consensus(g, 1);
  auto bad = p;
  bad.agents[0].q(0, 0) = -5;
  EXPECT_THROW(AdmmSystem(bad, g), ValidationError);
  bad = p;
  bad.shared.push_back({0, 1, 2, 1});
  EXPECT_THROW(AdmmSystem(bad, g), ValidationError);  // 0 and 2 not adjacent
  bad = p;
  bad.rho = 0;
  EXPECT_THROW(AdmmSystem(bad, g), ValidationError);
  bad = p;
  bad.shared.push_back({0, 0, 1, 1});
  EXPECT_THROW(AdmmSystem(bad, g), ValidationError);  // local variable shared twice
  EXPECT_THROW(AdmmSystem(p, make_path(4)), ValidationError);
}

TEST(Admm, DrivesTerminationUnderBothMethods) {
  auto g = make_random_connected(5, 22, 0.15);
  for (Method m : {Method::basic, Method::fault_tolerant}) {
    Scenario sc(g, m, AdmmCriterion{make_random_consensus(g, 5), true});
    sc.max_iterations = 3000;
    auto rep = run(sc);
    ASSERT_TRUE(rep.global_satisfied);
    const Iteration offset = m == Method::basic ? Iteration(g.diameter()) : ft_termination_offset(g.diameter(), 22);
    EXPECT_EQ(rep.common_termination(), *rep.global_satisfied + offset);
    ASSERT_EQ(rep.solution.size(), 22u);
  }
}
