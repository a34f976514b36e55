#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace mappcf;
using oracle::P;

TEST(Disjoint, Fig1Infeasible) {
  // both routes of j pass the centre that i must cross
  auto r = solve_disjoint(fixture("fig1").instance);
  EXPECT_EQ(r.kind, DisjointResult::Kind::Infeasible);
}

TEST(Disjoint, Fig8UsesCorridor) {
  auto r = solve_disjoint(fixture("fig8").instance);
  ASSERT_TRUE(r.solved());
  EXPECT_EQ(r.paths[0], P({1, 11, 12, 13, 14, 5}));
  EXPECT_EQ(r.paths[1], P({6, 7, 2, 8}));
  EXPECT_EQ(r.paths[2], P({9, 4, 10}));
}

TEST(Disjoint, SingleAgent) {
  Instance ins{Graph(3, {{0, 1}, {1, 2}}), {0}, {2}, 0};
  auto r = solve_disjoint(ins);
  ASSERT_TRUE(r.solved());
  EXPECT_EQ(r.paths[0], (Path{0, 1, 2}));
}

TEST(Disjoint, Timeout) {
  Graph g = random_grid(16, 16, 0.1, 2);
  Instance ins = gen_well_formed(g, 8, 1, 2);
  auto r = solve_disjoint(ins, Deadline(std::chrono::duration<double>(0)));
  EXPECT_EQ(r.kind, DisjointResult::Kind::Timeout);
}

TEST(Disjoint, AgreesWithEnumeration) {
  std::mt19937_64 rng(47);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int nv = 6 + static_cast<int>(rng() % 5);
    const int n = 2 + static_cast<int>(rng() % 2);
    Graph g = random_connected_graph(nv, static_cast<int>(rng() % 5), rng());
    Instance ins = gen_random(g, n, 1, rng());
    auto r = solve_disjoint(ins);
    const int best = oracle::min_disjoint_cost(ins);
    ASSERT_EQ(r.solved(), best >= 0) << "trial " << trial;
    if (!r.solved()) {
      ++infeasible;
      continue;
    }
    ++feasible;
    int cost = 0;
    for (const auto& p : r.paths) cost += static_cast<int>(p.size()) - 1;
    EXPECT_EQ(cost, best) << "trial " << trial;
    std::vector<int> owner(nv, -1);
    for (AgentId a = 0; a < n; ++a) {
      EXPECT_EQ(r.paths[a].front(), ins.starts[a]);
      EXPECT_EQ(r.paths[a].back(), ins.goals[a]);
      EXPECT_TRUE(path_follows_graph(g, r.paths[a], false));
      for (Vertex v : r.paths[a]) {
        ASSERT_TRUE(owner[v] == -1 || owner[v] == a) << "trial " << trial;
        owner[v] = a;
      }
    }
  }
  EXPECT_GT(feasible, 20);
  EXPECT_GT(infeasible, 20);
}
