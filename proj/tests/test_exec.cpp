#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mappcf;
using oracle::P;
using oracle::V;

namespace {

SynCrashPattern crash_at(int n, AgentId a, int t) {
  SynCrashPattern p;
  p.crash_time.assign(n, std::nullopt);
  p.crash_time[a] = t;
  return p;
}

SynCrashPattern no_crash(int n) {
  SynCrashPattern p;
  p.crash_time.assign(n, std::nullopt);
  return p;
}

}  // namespace

TEST(Observe, AnonymousAndNamed) {
  Fixture fx = fixture("fig1");
  Config c = initial_config(fx.instance, fx.references["syn"]);
  c.agents[0].status = Status::Crashed;
  auto afd = observe(fx.instance.graph, c, 1, FdMode::Afd);
  ASSERT_EQ(afd.size(), 2u);
  EXPECT_EQ(afd[0], std::pair(V(1), Observation::crashed_anon()));
  EXPECT_EQ(afd[1], std::pair(V(2), Observation::vacant()));
  auto nfd = observe(fx.instance.graph, c, 1, FdMode::Nfd);
  EXPECT_EQ(nfd[0].second, Observation::crashed(0));
}

TEST(Observe, IsolatedVertex) {
  Graph g(2, {});
  Config c;
  c.agents.push_back(AgentState{0, 1, 0, Status::Correct});
  EXPECT_TRUE(observe(g, c, 0, FdMode::Nfd).empty());
}

TEST(StepSyn, Fig1FirstStep) {
  Fixture fx = fixture("fig1");
  const Solution& sol = fx.references["syn"];
  auto st = step_syn(fx.instance, sol, initial_config(fx.instance, sol), {});
  EXPECT_FALSE(st.collision);
  EXPECT_EQ(st.next.agents[0].vertex, V(2));
  EXPECT_EQ(st.next.agents[1].vertex, V(4));
  EXPECT_EQ(st.next.agents[1].progress, 2);
}

TEST(StepSyn, AllDoneIsFixpoint) {
  Fixture fx = fixture("fig1");
  const Solution& sol = fx.references["syn"];
  Config c = initial_config(fx.instance, sol);
  c.agents[0] = AgentState{0, 3, V(3), Status::Done};
  c.agents[1] = AgentState{0, 4, V(5), Status::Done};
  auto st = step_syn(fx.instance, sol, c, {});
  EXPECT_EQ(st.next.agents, c.agents);
}

TEST(StepSyn, Fig1CrashAtCenter) {
  Fixture fx = fixture("fig1");
  const Solution& sol = fx.references["syn"];
  auto rr = run_syn(fx.instance, sol, crash_at(2, 0, 2));
  ASSERT_TRUE(rr.outcome.ok()) << to_string(rr.outcome);
  // j switches at time 2 and reaches v5 at time 4
  const auto& entries = rr.trace.entries;
  EXPECT_EQ(entries[2].fired.size(), 1u);
  EXPECT_EQ(entries[2].config.agents[1].path, 2);
  EXPECT_EQ(entries.back().config.time, 4);
  EXPECT_EQ(entries.back().config.agents[1].vertex, V(5));
}

TEST(StepSyn, DetectsVertexAndSwapCollisions) {
  Instance ins{Graph(3, {{0, 1}, {1, 2}}), {0, 2}, {2, 0}, 0};
  auto swap = solution_from_paths({{0, 1, 2}, {2, 1, 0}}, Model::Syn);
  auto rr = run_syn(ins, swap, no_crash(2));
  ASSERT_EQ(rr.outcome.kind, Outcome::Kind::Collision);
  EXPECT_FALSE(rr.outcome.collision->swap);
  EXPECT_EQ(rr.outcome.collision->vertex, 1);

  Instance ins2{Graph(2, {{0, 1}}), {0, 1}, {1, 0}, 0};
  auto rr2 = run_syn(ins2, solution_from_paths({{0, 1}, {1, 0}}, Model::Syn), no_crash(2));
  ASSERT_EQ(rr2.outcome.kind, Outcome::Kind::Collision);
  EXPECT_TRUE(rr2.outcome.collision->swap);
}

TEST(StepSyn, MovingOntoFinishedAgentCollides) {
  Instance ins{Graph(3, {{0, 1}, {1, 2}}), {0, 1}, {2, 1}, 0};
  auto sol = solution_from_paths({{0, 0, 1, 2}, {1}}, Model::Syn);
  // agent 1 sits on its goal and the other path walks over it
  auto rr = run_syn(ins, sol, no_crash(2));
  EXPECT_EQ(rr.outcome.kind, Outcome::Kind::Collision);
}

TEST(StepSeq, Fig1WaitsWhileOccupied) {
  Fixture fx = fixture("fig1");
  const Solution& sol = fx.references["seq"];
  auto rr = run_seq(fx.instance, sol, {SeqAction::activate(1)});
  EXPECT_EQ(rr.trace.entries.back().config.agents[1].vertex, V(4));
  EXPECT_TRUE(rr.trace.entries.back().fired.empty());
}

TEST(StepSeq, ActivationOnDoneAgentIsNoop) {
  Fixture fx = fixture("fig1");
  const Solution& sol = fx.references["seq"];
  Config c = initial_config(fx.instance, sol);
  c.agents[0] = AgentState{0, 3, V(3), Status::Done};
  auto st = step_seq(fx.instance, sol, c, SeqAction::activate(0));
  EXPECT_EQ(st.next.agents, c.agents);
}

TEST(StepSeq, Fig1CrashThenSwitch) {
  Fixture fx = fixture("fig1");
  const Solution& sol = fx.references["seq"];
  auto rr = run_seq(fx.instance, sol, {SeqAction::crash(0), SeqAction::activate(1)});
  const auto& s = rr.trace.entries.back().config.agents[1];
  EXPECT_EQ(s.path, 1);
  EXPECT_EQ(s.vertex, V(2));
}

TEST(StepSeq, BlockedMoveDoesNotAdvance) {
  Instance ins{Graph(2, {{0, 1}}), {0, 1}, {1, 0}, 0};
  auto sol = solution_from_paths({{0, 1}, {1, 0}}, Model::Seq);
  auto st = step_seq(ins, sol, initial_config(ins, sol), SeqAction::activate(0));
  EXPECT_EQ(st.next.agents[0].progress, 1);
  EXPECT_EQ(st.next.agents[0].vertex, 0);
}

TEST(Run, Fig6CrashOfJ) {
  Fixture fx = fixture("fig6");
  auto r = solve(fx.instance, SolverConfig{});
  ASSERT_TRUE(r.ok());
  auto rr = run_syn(fx.instance, *r.solution, crash_at(3, 1, 1));
  ASSERT_TRUE(rr.outcome.ok());
  Path visited;
  for (const auto& e : rr.trace.entries)
    if (visited.empty() || visited.back() != e.config.agents[0].vertex) visited.push_back(e.config.agents[0].vertex);
  EXPECT_EQ(visited, P({1, 5, 3, 4}));
}

TEST(Run, NoCrashFollowsPrimaries) {
  Fixture fx = fixture("fig6");
  auto r = solve(fx.instance, SolverConfig{});
  ASSERT_TRUE(r.ok());
  auto rr = run_syn(fx.instance, *r.solution, no_crash(3));
  ASSERT_TRUE(rr.outcome.ok());
  for (const auto& e : rr.trace.entries) {
    EXPECT_TRUE(e.fired.empty());
    for (const auto& s : e.config.agents) EXPECT_EQ(s.path, 0);
  }
}

TEST(Run, Fig1WithoutRulesGetsStuck) {
  Fixture fx = fixture("fig1");
  Solution sol = fx.references["syn"];
  sol.plans[1].rules.clear();
  // i crashes on v2 at time 2; j's primary needs v2 at time 3
  auto rr = run_syn(fx.instance, sol, crash_at(2, 0, 2));
  EXPECT_FALSE(rr.outcome.ok());
  if (rr.outcome.kind == Outcome::Kind::Stuck) EXPECT_EQ(rr.outcome.stuck, std::vector<AgentId>{1});
}

TEST(Run, TraceFormat) {
  Fixture fx = fixture("fig1");
  auto rr = run_syn(fx.instance, fx.references["syn"], crash_at(2, 0, 1));
  const std::string text = format_trace(rr.trace);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t=1 init | 0:v0/p0/i1/correct 1:v3/p0/i1/correct");
  EXPECT_NE(text.find("step crash{0}"), std::string::npos);
  EXPECT_NE(text.find("fired 1:r0"), std::string::npos);
}
