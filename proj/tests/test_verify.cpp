#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace mappcf;

namespace {

void expect_replays(const Instance& ins, const Solution& sol, const VerifyResult& v) {
  ASSERT_EQ(v.kind, VerifyResult::Kind::Counterexample);
  if (v.syn_witness) {
    ASSERT_LE(v.syn_witness->num_crashes(), ins.f);
    auto rr = run_syn(ins, sol, *v.syn_witness);
    EXPECT_FALSE(rr.outcome.ok());
    EXPECT_EQ(to_string(rr.outcome), to_string(v.outcome));
  } else {
    ASSERT_TRUE(v.seq_witness);
    int crashes = 0;
    for (const auto& a : *v.seq_witness) crashes += a.kind == SeqAction::Kind::Crash;
    ASSERT_LE(crashes, ins.f);
    auto rr = run_seq(ins, sol, *v.seq_witness);
    EXPECT_FALSE(rr.outcome.ok());
    EXPECT_EQ(to_string(rr.outcome), to_string(v.outcome));
  }
}

}  // namespace

TEST(VerifySyn, Fig1Reference) {
  Fixture fx = fixture("fig1");
  EXPECT_TRUE(verify_syn(fx.instance, fx.references["syn"]).verified());
}

TEST(VerifySyn, ClassicalPlanWithoutCrashes) {
  Fixture fx = fixture("fig6");
  fx.instance.f = 0;
  auto r = solve(fx.instance, SolverConfig{});
  ASSERT_TRUE(r.ok());
  for (const auto& p : r.solution->plans) EXPECT_TRUE(p.rules.empty());
  EXPECT_TRUE(verify_syn(fx.instance, *r.solution).verified());
}

TEST(VerifySyn, Fig6MissingSecondBackup) {
  Fixture fx = fixture("fig6");
  fx.instance.f = 2;
  auto r = solve(fx.instance, SolverConfig{});
  ASSERT_TRUE(r.ok());
  ASSERT_TRUE(verify_syn(fx.instance, *r.solution).verified());
  // drop the backup that handles k's crash while i is already detouring around j
  Solution broken = *r.solution;
  auto& rules = broken.plans[0].rules;
  rules.erase(std::remove_if(rules.begin(), rules.end(), [](const TransitionRule& x) { return x.from_path == 1; }),
              rules.end());
  auto v = verify_syn(fx.instance, broken);
  expect_replays(fx.instance, broken, v);
  EXPECT_EQ(v.syn_witness->crash_time[1], 1);
  EXPECT_EQ(v.syn_witness->crash_time[2], 2);
  EXPECT_FALSE(v.syn_witness->crash_time[0]);
}

TEST(VerifySyn, RulesRemovedGivesReplayableWitness) {
  Fixture fx = fixture("fig1");
  Solution sol = fx.references["syn"];
  sol.plans[1].rules.clear();
  expect_replays(fx.instance, sol, verify_syn(fx.instance, sol));
}

TEST(VerifySyn, StateCap) {
  Fixture fx = fixture("fig1");
  VerifyOptions opt;
  opt.max_states = 2;
  EXPECT_EQ(verify_syn(fx.instance, fx.references["syn"], opt).kind, VerifyResult::Kind::TooLarge);
}

TEST(VerifySyn, AgreesWithSingleCrashEnumeration) {
  std::mt19937_64 rng(21);
  int refuted = 0, checked = 0;
  for (int trial = 0; trial < 250; ++trial) {
    const int nv = 6 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 2);
    Graph g = random_connected_graph(nv, static_cast<int>(rng() % 5), rng());
    Instance ins = gen_random(g, n, 1, rng());
    // candidate plans: DCRF output, or its primaries alone
    SolverConfig cfg;
    auto r = solve(ins, cfg);
    if (!r.ok()) continue;
    for (bool strip : {false, true}) {
      Solution sol = *r.solution;
      if (strip)
        for (auto& p : sol.plans) p.rules.clear();
      const bool exact = verify_syn(ins, sol).verified();
      const bool brute = oracle::syn_verified_by_enumeration(ins, sol, oracle::plan_horizon(sol));
      ASSERT_EQ(exact, brute) << "trial " << trial << " strip " << strip;
      refuted += !exact;
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
  EXPECT_GT(refuted, 0);
}

TEST(VerifySyn, MonotoneInBudget) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 120; ++trial) {
    const int nv = 6 + static_cast<int>(rng() % 6);
    Graph g = random_connected_graph(nv, static_cast<int>(rng() % 5), rng());
    Instance ins = gen_random(g, 3, 2, rng());
    auto r = solve(ins, SolverConfig{});
    if (!r.ok()) continue;
    bool prev = true;
    for (int f = 0; f <= 2; ++f) {
      Instance at = ins;
      at.f = f;
      const bool ok = verify_syn(at, *r.solution).verified();
      if (!prev) EXPECT_FALSE(ok) << "trial " << trial;
      prev = ok;
    }
  }
}

TEST(VerifySyn, DisjointPathsAlwaysVerify) {
  std::mt19937_64 rng(29);
  int solved = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const int nv = 6 + static_cast<int>(rng() % 6);
    Graph g = random_connected_graph(nv, static_cast<int>(rng() % 6), rng());
    const int n = 2 + static_cast<int>(rng() % 2);
    Instance ins = gen_random(g, n, n - 1, rng());
    auto d = solve_disjoint(ins);
    if (!d.solved()) continue;
    ++solved;
    EXPECT_TRUE(verify_syn(ins, solution_from_paths(d.paths, Model::Syn)).verified()) << "trial " << trial;
    EXPECT_TRUE(verify_seq(ins, solution_from_paths(d.paths, Model::Seq)).verified()) << "trial " << trial;
  }
  EXPECT_GT(solved, 10);
}

TEST(VerifySeq, Fig1Reference) {
  Fixture fx = fixture("fig1");
  EXPECT_TRUE(verify_seq(fx.instance, fx.references["seq"]).verified());
}

TEST(VerifySeq, Fig1RulesRemoved) {
  Fixture fx = fixture("fig1");
  Solution sol = fx.references["seq"];
  sol.plans[1].rules.clear();
  auto v = verify_seq(fx.instance, sol);
  expect_replays(fx.instance, sol, v);
}

TEST(VerifySeq, NamedDetectorWitness) {
  Fixture fx = fixture("seq_anonymous");
  EXPECT_TRUE(verify_seq(fx.instance, fx.references["nfd"]).verified());
}

TEST(VerifySeq, AnonymousDetectorRefuted) {
  Fixture fx = fixture("seq_anonymous");
  const Solution& sol = fx.references["afd"];
  auto v = verify_seq(fx.instance, sol);
  expect_replays(fx.instance, sol, v);
  // an anonymous crash on the hub sends an agent toward a goal that is already occupied
  EXPECT_EQ(v.outcome.kind, Outcome::Kind::Stuck);
  EXPECT_EQ(v.outcome.stuck.size(), 1u);
}

TEST(VerifySeq, HeadOnPathsDeadlock) {
  Instance ins{Graph(3, {{0, 1}, {1, 2}}), {0, 2}, {2, 0}, 0};
  auto sol = solution_from_paths({{0, 1, 2}, {2, 1, 0}}, Model::Seq);
  expect_replays(ins, sol, verify_seq(ins, sol));
}
