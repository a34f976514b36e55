#pragma once

// Instance generation: seeded random instances, the 3-CNF reduction, and the
// hand-built reference instances.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mappcf/core.hpp"

namespace mappcf {

struct GiveUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Graphs

/// 4-connected w x h grid; cells listed in `blocked` are left out and the
/// remaining cells are renumbered row-major.
inline Graph grid_graph(int w, int h, const std::vector<char>& blocked = {}) {
  auto free = [&](int x, int y) { return blocked.empty() || !blocked[y * w + x]; };
  std::vector<int> id(w * h, -1);
  int n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (free(x, y)) id[y * w + x] = n++;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (id[y * w + x] < 0) continue;
      if (x + 1 < w && id[y * w + x + 1] >= 0) edges.emplace_back(id[y * w + x], id[y * w + x + 1]);
      if (y + 1 < h && id[(y + 1) * w + x] >= 0) edges.emplace_back(id[y * w + x], id[(y + 1) * w + x]);
    }
  return Graph(n, edges);
}

/// Largest connected component of g, renumbered in increasing id order.
inline Graph largest_component(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<int> comp(n, -1);
  int best = -1, best_size = 0, c = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<Vertex> q{s};
    comp[s] = c;
    for (std::size_t h = 0; h < q.size(); ++h)
      for (Vertex v : g.neighbors(q[h]))
        if (comp[v] < 0) {
          comp[v] = c;
          q.push_back(v);
        }
    if (static_cast<int>(q.size()) > best_size) {
      best_size = static_cast<int>(q.size());
      best = c;
    }
    ++c;
  }
  std::vector<int> id(n, -1);
  int m = 0;
  for (Vertex v = 0; v < n; ++v)
    if (comp[v] == best) id[v] = m++;
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (auto [u, v] : g.edges())
    if (id[u] >= 0 && id[v] >= 0) edges.emplace_back(id[u], id[v]);
  return Graph(m, edges, g.directed());
}

/// w x h grid with a seeded fraction of obstacle cells, reduced to its
/// largest connected component.
inline Graph random_grid(int w, int h, double obstacle_ratio, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> cells(w * h);
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<char> blocked(w * h, 0);
  const int k = static_cast<int>(obstacle_ratio * w * h + 0.5);
  for (int i = 0; i < k; ++i) blocked[cells[i]] = 1;
  return largest_component(grid_graph(w, h, blocked));
}

/// Connected undirected graph: a random spanning tree plus `extra_edges`
/// random chords.
inline Graph random_connected_graph(int n, int extra_edges, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    edges.emplace_back(pick(rng), v);
  }
  if (n >= 2) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < extra_edges; ++e) {
      Vertex u = pick(rng), v = pick(rng);
      if (u != v) edges.emplace_back(u, v);
    }
  }
  return Graph(n, edges);
}

// ---------------------------------------------------------------------------
// Instances

/// Samples distinct starts and goals until the necessary condition holds.
inline Instance gen_well_formed(const Graph& g, int n, int f, std::uint64_t seed, int max_tries = 10'000) {
  if (2 * n > g.num_vertices()) throw GiveUp("not enough vertices for distinct starts and goals");
  std::mt19937_64 rng(seed);
  std::vector<Vertex> vs(g.num_vertices());
  std::iota(vs.begin(), vs.end(), 0);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::shuffle(vs.begin(), vs.end(), rng);
    Instance ins;
    ins.graph = g;
    ins.f = f;
    ins.starts.assign(vs.begin(), vs.begin() + n);
    ins.goals.assign(vs.begin() + n, vs.begin() + 2 * n);
    if (check_necessary(ins).holds) return ins;
  }
  throw GiveUp("no well-formed instance after " + std::to_string(max_tries) + " attempts");
}

/// Uniformly random distinct starts and goals, no filtering.
inline Instance gen_random(const Graph& g, int n, int f, std::uint64_t seed) {
  if (2 * n > g.num_vertices()) throw GiveUp("not enough vertices for distinct starts and goals");
  std::mt19937_64 rng(seed);
  std::vector<Vertex> vs(g.num_vertices());
  std::iota(vs.begin(), vs.end(), 0);
  std::shuffle(vs.begin(), vs.end(), rng);
  Instance ins;
  ins.graph = g;
  ins.f = f;
  ins.starts.assign(vs.begin(), vs.begin() + n);
  ins.goals.assign(vs.begin() + n, vs.begin() + 2 * n);
  return ins;
}

// ---------------------------------------------------------------------------
// 3-CNF reduction

/// Literals are +v / -v with variables numbered from 1.
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

inline Cnf parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Cnf cnf;
  bool header = false;
  std::vector<int> cur;
  int declared_clauses = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c" || tok[0] == 'c' || tok == "%") continue;
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> cnf.num_vars >> declared_clauses) || fmt != "cnf" || cnf.num_vars < 0)
        throw std::runtime_error("malformed DIMACS header: " + line);
      header = true;
      continue;
    }
    if (!header) throw std::runtime_error("DIMACS clause before header");
    std::istringstream all(line);
    long lit;
    while (all >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(cur);
        cur.clear();
        continue;
      }
      if (std::abs(lit) > cnf.num_vars) throw std::runtime_error("literal out of range: " + std::to_string(lit));
      cur.push_back(static_cast<int>(lit));
    }
    if (!all.eof()) throw std::runtime_error("malformed DIMACS clause: " + line);
  }
  if (!header) throw std::runtime_error("missing DIMACS header");
  if (!cur.empty()) cnf.clauses.push_back(cur);
  return cnf;
}

inline bool brute_force_sat(const Cnf& cnf) {
  for (std::uint64_t m = 0; m < (1ull << cnf.num_vars); ++m) {
    bool all = true;
    for (const auto& cl : cnf.clauses) {
      bool any = false;
      for (int lit : cl) any = any || (((m >> (std::abs(lit) - 1)) & 1) == (lit > 0 ? 1u : 0u));
      all = all && any;
    }
    if (all) return true;
  }
  return false;
}

/// Directed reduction: one agent per variable choosing an upper or lower
/// route, one agent per clause choosing a literal. A variable agent's upper
/// route crosses the shared vertices of its negative occurrences, the lower
/// route those of its positive occurrences. Vertex-disjoint paths exist iff
/// the formula is satisfiable.
inline Instance sat_to_mappcf(const Cnf& cnf, int f = 1) {
  for (const auto& cl : cnf.clauses) {
    if (cl.empty() || cl.size() > 3) throw std::runtime_error("clauses must have 1 to 3 literals");
    for (int lit : cl)
      if (lit == 0 || std::abs(lit) > cnf.num_vars) throw std::runtime_error("literal out of range");
  }
  int next = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;
  Instance ins;
  ins.f = f;

  struct VarGadget {
    Vertex s, g, up, low;
  };
  std::vector<VarGadget> vars(cnf.num_vars);
  for (auto& v : vars) v = {next++, next++, next++, next++};

  // shared vertex per occurrence, chained along the variable's routes
  std::vector<std::vector<Vertex>> occ(cnf.clauses.size());
  std::vector<Vertex> tail_up(cnf.num_vars), tail_low(cnf.num_vars);
  for (int x = 0; x < cnf.num_vars; ++x) {
    edges.emplace_back(vars[x].s, vars[x].up);
    edges.emplace_back(vars[x].s, vars[x].low);
    tail_up[x] = vars[x].up;
    tail_low[x] = vars[x].low;
  }
  for (std::size_t c = 0; c < cnf.clauses.size(); ++c)
    for (int lit : cnf.clauses[c]) {
      const int x = std::abs(lit) - 1;
      Vertex s = next++;
      occ[c].push_back(s);
      Vertex& tail = lit > 0 ? tail_low[x] : tail_up[x];
      edges.emplace_back(tail, s);
      tail = s;
    }
  for (int x = 0; x < cnf.num_vars; ++x) {
    edges.emplace_back(tail_up[x], vars[x].g);
    edges.emplace_back(tail_low[x], vars[x].g);
    ins.starts.push_back(vars[x].s);
    ins.goals.push_back(vars[x].g);
  }
  for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
    Vertex s = next++, g = next++;
    for (Vertex shared : occ[c]) {
      Vertex w = next++;
      edges.emplace_back(s, w);
      edges.emplace_back(w, shared);
      edges.emplace_back(shared, g);
    }
    ins.starts.push_back(s);
    ins.goals.push_back(g);
  }
  ins.graph = Graph(next, edges, true);
  return ins;
}

// ---------------------------------------------------------------------------
// Reference instances. Vertex v_k of the drawings has id k-1; agents are
// numbered i=0, j=1, k=2.

struct Fixture {
  Instance instance;
  std::map<std::string, Solution> references;
  std::vector<AgentId> priority;
};

namespace detail {

inline Graph graph_1based(int n, std::initializer_list<std::pair<int, int>> es) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (auto [u, v] : es) edges.emplace_back(u - 1, v - 1);
  return Graph(n, edges);
}

inline Path p1(std::initializer_list<int> vs) {
  Path p;
  for (int v : vs) p.push_back(v - 1);
  return p;
}

}  // namespace detail

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"fig1", "fig3", "fig6", "fig8", "seq_anonymous"};
  return names;
}

inline Fixture fixture(const std::string& name) {
  using detail::p1;
  Fixture fx;
  Instance& ins = fx.instance;
  auto rule = [](int from, int idx, int watch, Observation trig, int to) {
    return TransitionRule{from, idx, watch - 1, trig, to};
  };

  if (name == "fig1") {
    ins.graph = detail::graph_1based(5, {{1, 2}, {2, 3}, {2, 4}, {2, 5}, {1, 4}, {1, 5}});
    ins.starts = {0, 3};
    ins.goals = {2, 4};
    ins.f = 1;
    Solution syn;
    syn.model = Model::Syn;
    syn.fd_mode = FdMode::Afd;
    syn.plans.push_back(Plan{{p1({1, 2, 3})}, {}});
    syn.plans.push_back(Plan{{p1({4, 4, 2, 5}), p1({4, 2, 5}), p1({4, 1, 5})},
                             {rule(0, 1, 1, Observation::crashed_anon(), 1),
                              rule(0, 2, 2, Observation::crashed_anon(), 2)}});
    fx.references["syn"] = syn;
    Solution seq;
    seq.model = Model::Seq;
    seq.fd_mode = FdMode::Afd;
    seq.plans.push_back(Plan{{p1({1, 2, 3})}, {}});
    seq.plans.push_back(Plan{{p1({4}), p1({4, 2, 5}), p1({4, 1, 5})},
                             {rule(0, 1, 1, Observation::crashed_anon(), 1),
                              rule(0, 1, 1, Observation::vacant(), 2)}});
    fx.references["seq"] = seq;
  } else if (name == "fig3") {
    ins.graph = detail::graph_1based(6, {{1, 2}, {2, 3}, {3, 4}, {2, 5}, {3, 5}, {2, 6}, {3, 6}});
    ins.starts = {0, 4};
    ins.goals = {3, 5};
    ins.f = 1;
    Solution syn;
    syn.model = Model::Syn;
    syn.fd_mode = FdMode::Nfd;
    syn.plans.push_back(Plan{{p1({1, 2, 3, 4})}, {}});
    syn.plans.push_back(Plan{{p1({5, 5, 5, 3, 6}), p1({5, 3, 6}), p1({5, 2, 6})},
                             {rule(0, 2, 2, Observation::crashed(0), 1),
                              rule(0, 3, 3, Observation::crashed(0), 2)}});
    fx.references["syn"] = syn;
  } else if (name == "fig6") {
    ins.graph = detail::graph_1based(7, {{1, 2}, {2, 3}, {3, 4}, {2, 5}, {3, 6}, {5, 6},
                                         {1, 5}, {6, 4}, {7, 3}, {7, 4}, {2, 7}, {5, 3}});
    ins.starts = {0, 1, 6};
    ins.goals = {3, 4, 5};
    ins.f = 1;
  } else if (name == "fig8") {
    // v12..v14 extend the long corridor v1 - v11 - ... - v5
    ins.graph = detail::graph_1based(14, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {6, 7}, {7, 2}, {2, 8}, {9, 4},
                                          {4, 10}, {1, 7}, {1, 8}, {1, 11}, {11, 12}, {12, 13}, {13, 14},
                                          {14, 5}});
    ins.starts = {0, 5, 8};
    ins.goals = {4, 7, 9};
    ins.f = 2;
    fx.priority = {0, 1, 2};
  } else if (name == "seq_anonymous") {
    // v1/v6: i's start/goal, v5/v2: j's, v4/v3: k's, v7: hub
    ins.graph = detail::graph_1based(7, {{7, 1}, {7, 2}, {7, 3}, {7, 4}, {7, 5}, {7, 6}, {1, 2}, {1, 3}, {2, 3},
                                         {2, 4}, {3, 5}, {4, 6}, {5, 6}, {2, 6}, {3, 6}});
    ins.starts = {0, 4, 3};
    ins.goals = {5, 1, 2};
    ins.f = 2;
    for (FdMode fd : {FdMode::Nfd, FdMode::Afd}) {
      Solution sol;
      sol.model = Model::Seq;
      sol.fd_mode = fd;
      for (AgentId a = 0; a < 3; ++a) {
        const AgentId x = (a + 1) % 3, y = (a + 2) % 3;
        const Vertex s = ins.starts[a], g = ins.goals[a];
        auto trig = [&](AgentId who) {
          return fd == FdMode::Nfd ? Observation::crashed(who) : Observation::crashed_anon();
        };
        Plan p;
        p.paths = {{s, 6, g}, {s, ins.goals[x], g}, {s, ins.goals[y], g}};
        p.rules = {{0, 1, 6, trig(x), 1},
                   {0, 1, 6, trig(y), 2},
                   {1, 1, ins.goals[x], trig(y), 2},
                   {2, 1, ins.goals[y], trig(x), 1}};
        sol.plans.push_back(std::move(p));
      }
      fx.references[fd == FdMode::Nfd ? "nfd" : "afd"] = sol;
    }
  } else {
    throw std::invalid_argument("unknown fixture: " + name);
  }
  return fx;
}

}  // namespace mappcf
