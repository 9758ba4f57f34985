#include <gtest/gtest.h>

#include "dterm/basic.hpp"
#include "dterm/sim.hpp"
#include "fixtures.hpp"

using namespace dterm;

TEST(Basic, Init) {
  auto s = init_basic(3);
  EXPECT_EQ(s.v, (StatusBits{0, 0, 0}));
  EXPECT_EQ(s.t_scalar, 0);
  EXPECT_EQ(init_basic(1).v.size(), 1u);
  EXPECT_EQ(init_basic(22).v, StatusBits(22, 0));
  EXPECT_THROW(init_basic(0), ContractError);
}

TEST(Basic, SingleAgentTerminatesImmediately) {
  std::vector<AgentId> none;
  auto out = step_basic(0, init_basic(1), true, std::span<const BasicMessage>{}, none, 1, 0);
  EXPECT_EQ(out.state.v, StatusBits{1});
  EXPECT_EQ(out.state.t_scalar, 1);
  EXPECT_TRUE(out.terminate);
}

TEST(Basic, TwoAgentsByHand) {
  std::vector<AgentId> n0{1}, n1{0};
  auto s0 = init_basic(2), s1 = init_basic(2);
  std::vector<BasicMessage> in0{make_message(1, s1, 0)}, in1{make_message(0, s0, 0)};
  auto a = step_basic(0, s0, true, in0, n0, 1, 1);
  auto b = step_basic(1, s1, true, in1, n1, 1, 1);
  EXPECT_EQ(a.state.v, (StatusBits{1, 0}));
  EXPECT_EQ(b.state.v, (StatusBits{0, 1}));
  EXPECT_EQ(a.state.t_scalar, 1);
  EXPECT_FALSE(a.terminate || b.terminate);

  in0 = {make_message(1, b.state, 1)};
  in1 = {make_message(0, a.state, 1)};
  auto a2 = step_basic(0, a.state, true, in0, n0, 2, 1);
  auto b2 = step_basic(1, b.state, true, in1, n1, 2, 1);
  EXPECT_EQ(a2.state.v, (StatusBits{1, 1}));
  EXPECT_EQ(b2.state.v, (StatusBits{1, 1}));
  EXPECT_EQ(a2.state.t_scalar, 1);
  EXPECT_TRUE(a2.terminate);
  EXPECT_TRUE(b2.terminate);
}

TEST(Basic, InboxContract) {
  std::vector<AgentId> nb{1, 2};
  auto s = init_basic(3);
  std::vector<BasicMessage> one{make_message(1, s, 0)};
  EXPECT_THROW(step_basic(0, s, true, one, nb, 1, 2), ContractError);
  std::vector<BasicMessage> stale{make_message(1, s, 0), make_message(2, s, 1)};
  EXPECT_THROW(step_basic(0, s, true, stale, nb, 1, 2), ContractError);
  std::vector<BasicMessage> stranger{make_message(1, s, 0), make_message(0, s, 0)};
  EXPECT_THROW(step_basic(0, s, true, stranger, nb, 1, 2), ContractError);
  std::vector<BasicMessage> twice{make_message(1, s, 0), make_message(1, s, 0)};
  EXPECT_THROW(step_basic(0, s, true, twice, nb, 1, 2), ContractError);
  EXPECT_THROW(step_basic(0, s, true, std::vector<BasicMessage>{make_message(1, s, 0), make_message(2, s, 0)},
                          nb, 0, 2),
               ContractError);
}

TEST(Basic, OwnEntryOnlyViaLocalCriterion) {
  // A neighbor claiming our own entry does not set it.
  std::vector<AgentId> nb{1};
  auto s = init_basic(2);
  auto other = init_basic(2);
  other.v = {1, 1};
  other.t_scalar = 3;
  std::vector<BasicMessage> in{make_message(1, other, 3)};
  auto out = step_basic(0, s, false, in, nb, 4, 1);
  EXPECT_EQ(out.state.v, (StatusBits{0, 1}));
  EXPECT_EQ(out.state.t_scalar, 3);
  EXPECT_FALSE(out.terminate);
}

TEST(Basic, GlobalCriterionOracle) {
  EXPECT_EQ(global_criterion_oracle({{1, 1, 1}}), 1);
  EXPECT_EQ(global_criterion_oracle({{0, 0}, {0, 0}}), std::nullopt);
  EXPECT_EQ(global_criterion_oracle({}), std::nullopt);
  EXPECT_EQ(global_criterion_oracle({{1, 0}, {0, 1}, {1, 1}}), 3);
  auto rows = schedule_matrix(fixture::schedule(fixture::twenty_two_schedule()), 900);
  EXPECT_EQ(global_criterion_oracle(rows), 862);
}

TEST(Basic, ExactTerminationOnSmallGraphs) {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (auto g : {make_path(n), make_star(n), make_complete(n)}) {
      std::vector<std::optional<Iteration>> at;
      for (std::size_t i = 0; i < n; ++i) at.emplace_back(1 + Iteration((i * 7) % 5));
      auto rep = run(fixture::scripted(g, Method::basic, at));
      ASSERT_TRUE(rep.global_satisfied);
      EXPECT_EQ(rep.common_termination(), *rep.global_satisfied + Iteration(g.diameter()));
      EXPECT_EQ(rep.post_termination_reads, 0u);
    }
  }
}

TEST(Basic, InformationLatencyEqualsDistance) {
  auto g = make_random_connected(3, 15, 0.15);
  std::vector<std::optional<Iteration>> at;
  for (AgentId i = 0; i < 15; ++i) at.emplace_back(2 + Iteration((i * 11) % 9));
  auto rep = run(fixture::scripted(g, Method::basic, at));
  for (const auto& rec : rep.trace) {
    for (AgentId j = 0; j < 15; ++j) {
      const bool want = rec.iteration >= *at[j] + Iteration(g.distance(rec.agent, j));
      ASSERT_EQ(bool(rec.v[j]), want) << "agent " << rec.agent << " entry " << j << " t " << rec.iteration;
    }
  }
}

TEST(Basic, StrictVerbatimTCanBreakSimultaneity) {
  // The last agent sits at the end of a path; without its own T in the max it adopts
  // the neighbor's older T one round after satisfying and stops early.
  auto sc = fixture::scripted(make_path(3), Method::basic, {1, 1, 5});
  sc.flags.strict_verbatim_t = true;
  auto rep = run(sc);
  EXPECT_EQ(rep.termination[2], 6);
  EXPECT_EQ(rep.termination[0], 7);
  EXPECT_FALSE(rep.common_termination());

  sc.flags.strict_verbatim_t = false;
  EXPECT_EQ(run(sc).common_termination(), 7);
}

TEST(Basic, NeverSatisfiedAgentBlocksTermination) {
  auto rep = run(fixture::scripted(make_ring(5), Method::basic, {1, 2, std::nullopt, 1, 1}, 50));
  EXPECT_FALSE(rep.global_satisfied);
  EXPECT_EQ(rep.iterations_run, 50);
  for (const auto& t : rep.termination) EXPECT_FALSE(t);
}
