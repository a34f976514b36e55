#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mappcf;

TEST(Fixtures, Sizes) {
  EXPECT_EQ(fixture("fig1").instance.graph.num_vertices(), 5);
  EXPECT_EQ(fixture("fig1").instance.graph.num_edges(), 6u);
  EXPECT_EQ(fixture("fig6").instance.graph.num_vertices(), 7);
  EXPECT_EQ(fixture("fig6").instance.graph.num_edges(), 12u);
  EXPECT_EQ(fixture("fig8").instance.num_agents(), 3);
  EXPECT_EQ(fixture("fig8").priority, (std::vector<AgentId>{0, 1, 2}));
  EXPECT_THROW(fixture("nope"), std::invalid_argument);
}

TEST(Fixtures, AllValid) {
  for (const auto& name : fixture_names()) {
    Fixture fx = fixture(name);
    EXPECT_TRUE(is_valid(fx.instance)) << name;
    for (const auto& [key, sol] : fx.references)
      for (AgentId a = 0; a < fx.instance.num_agents(); ++a)
        for (const auto& p : sol.plans[a].paths) EXPECT_TRUE(path_follows_graph(fx.instance.graph, p)) << name;
  }
}

TEST(Grid, FourConnected) {
  Graph g = grid_graph(3, 2);
  EXPECT_EQ(g.num_vertices(), 6);
  EXPECT_EQ(g.num_edges(), 7u);
}

TEST(Grid, RandomGridIsConnected) {
  Graph g = random_grid(16, 16, 0.1, 5);
  auto d = bfs_distances(g, 0);
  for (int x : d) EXPECT_GE(x, 0);
  EXPECT_GT(g.num_vertices(), 200);
}

TEST(WellFormed, SatisfiesNecessaryCondition) {
  Graph g = random_grid(8, 8, 0.1, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Instance ins = gen_well_formed(g, 4, 1, seed);
    EXPECT_TRUE(is_valid(ins));
    EXPECT_TRUE(check_necessary(ins).holds);
  }
}

TEST(WellFormed, GivesUpOnAStar) {
  // a star with three leaves: one of the four endpoints is the hub, which the other agent cannot avoid
  Graph g(4, {{0, 1}, {0, 2}, {0, 3}});
  EXPECT_THROW(gen_well_formed(g, 2, 1, 0, 200), GiveUp);
  EXPECT_THROW(gen_well_formed(g, 3, 0, 0, 10), GiveUp);  // needs more vertices than exist
}

TEST(Dimacs, Parses) {
  auto c = parse_dimacs("c hello\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n");
  EXPECT_EQ(c.num_vars, 3);
  EXPECT_EQ(c.clauses, (std::vector<std::vector<int>>{{1, -2}, {2, 3, -1}}));
}

TEST(Dimacs, Errors) {
  EXPECT_THROW(parse_dimacs("1 2 0\n"), std::runtime_error);
  EXPECT_THROW(parse_dimacs("p cnf 1 1\n2 0\n"), std::runtime_error);
  EXPECT_THROW(parse_dimacs("p dnf 1 1\n1 0\n"), std::runtime_error);
}

TEST(Sat, GadgetSize) {
  Cnf c{3, {{1, 2, 3}, {-1, -2, 3}}};
  Instance ins = sat_to_mappcf(c);
  EXPECT_EQ(ins.num_agents(), 5);
  EXPECT_EQ(ins.graph.num_vertices(), 28);
  EXPECT_EQ(ins.graph.num_edges(), 36u);
  EXPECT_TRUE(ins.graph.directed());
}

TEST(Sat, SingleClause) {
  EXPECT_TRUE(oracle::disjoint_tuple_exists(sat_to_mappcf(Cnf{1, {{1}}})));
  EXPECT_FALSE(oracle::disjoint_tuple_exists(sat_to_mappcf(Cnf{1, {{1}, {-1}}})));
}

TEST(Sat, RejectsLongClauses) { EXPECT_THROW(sat_to_mappcf(Cnf{4, {{1, 2, 3, 4}}}), std::runtime_error); }

TEST(Sat, EquisatisfiableOnTwoVariables) {
  // every formula over two variables with up to two 2-literal clauses
  const std::vector<int> lits{1, -1, 2, -2};
  std::vector<std::vector<int>> clauses;
  for (int a : lits)
    for (int b : lits)
      if (std::abs(a) < std::abs(b)) clauses.push_back({a, b});
  for (int a : lits) clauses.push_back({a});
  for (std::size_t x = 0; x < clauses.size(); ++x)
    for (std::size_t y = x; y < clauses.size(); ++y) {
      Cnf c{2, {clauses[x], clauses[y]}};
      EXPECT_EQ(brute_force_sat(c), oracle::disjoint_tuple_exists(sat_to_mappcf(c))) << x << "," << y;
      EXPECT_EQ(brute_force_sat(c), solve_disjoint(sat_to_mappcf(c)).solved()) << x << "," << y;
    }
}
