#pragma once

// Independent brute-force reference computations for the test suites.

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "mappcf/mappcf.hpp"

namespace oracle {

using namespace mappcf;

/// Vertex v_k of a drawing.
constexpr Vertex V(int k) { return k - 1; }

inline Path P(std::initializer_list<int> ks) {
  Path p;
  for (int k : ks) p.push_back(V(k));
  return p;
}

/// Plain DFS reachability that skips vertices with avoid[v].
inline bool reachable(const Graph& g, Vertex s, Vertex t, const std::vector<char>& avoid) {
  if (avoid[s] || avoid[t]) return false;
  std::vector<char> seen(g.num_vertices(), 0);
  std::function<bool(Vertex)> dfs = [&](Vertex u) {
    if (u == t) return true;
    seen[u] = 1;
    for (Vertex v : g.neighbors(u))
      if (!seen[v] && !avoid[v] && dfs(v)) return true;
    return false;
  };
  return dfs(s);
}

/// Necessary condition checked by explicit subset enumeration.
inline bool necessary_by_enumeration(const Instance& ins) {
  const int n = ins.num_agents(), nv = ins.graph.num_vertices();
  for (AgentId i = 0; i < n; ++i) {
    std::vector<char> avoid(nv, 0);
    for (AgentId j = 0; j < n; ++j)
      if (j != i) avoid[ins.goals[j]] = 1;
    if (!reachable(ins.graph, ins.starts[i], ins.goals[i], avoid)) return false;
    const int k = std::min(ins.f, n - 1);
    std::vector<AgentId> others;
    for (AgentId j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    std::vector<char> pick(others.size(), 0);
    std::fill(pick.begin(), pick.begin() + std::max(k, 0), 1);
    std::sort(pick.begin(), pick.end());
    do {
      std::vector<char> av(nv, 0);
      for (std::size_t x = 0; x < others.size(); ++x)
        if (pick[x]) av[ins.starts[others[x]]] = 1;
      if (!reachable(ins.graph, ins.starts[i], ins.goals[i], av)) return false;
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  return true;
}

/// Every simple path from s to t with at most max_vertices vertices.
inline std::vector<Path> simple_paths(const Graph& g, Vertex s, Vertex t, int max_vertices = 1 << 30) {
  std::vector<Path> out;
  Path cur{s};
  std::vector<char> on(g.num_vertices(), 0);
  on[s] = 1;
  std::function<void()> rec = [&] {
    Vertex u = cur.back();
    if (u == t) {
      out.push_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) >= max_vertices) return;
    for (Vertex v : g.neighbors(u))
      if (!on[v]) {
        on[v] = 1;
        cur.push_back(v);
        rec();
        cur.pop_back();
        on[v] = 0;
      }
  };
  rec();
  return out;
}

/// Least total length (edges) over tuples of pairwise vertex-disjoint simple
/// paths, or -1 when no such tuple exists.
inline int min_disjoint_cost(const Instance& ins) {
  const int n = ins.num_agents();
  std::vector<std::vector<Path>> cands(n);
  for (AgentId a = 0; a < n; ++a) cands[a] = simple_paths(ins.graph, ins.starts[a], ins.goals[a]);
  std::vector<char> used(ins.graph.num_vertices(), 0);
  int best = -1;
  std::function<void(int, int)> rec = [&](int a, int cost) {
    if (best >= 0 && cost >= best) return;
    if (a == n) {
      best = cost;
      return;
    }
    for (const auto& p : cands[a]) {
      bool ok = std::none_of(p.begin(), p.end(), [&](Vertex v) { return used[v]; });
      if (!ok) continue;
      for (Vertex v : p) used[v] = 1;
      rec(a + 1, cost + static_cast<int>(p.size()) - 1);
      for (Vertex v : p) used[v] = 0;
    }
  };
  rec(0, 0);
  return best;
}

/// Does some tuple of pairwise vertex-disjoint simple paths exist?
inline bool disjoint_tuple_exists(const Instance& ins) { return min_disjoint_cost(ins) >= 0; }

/// SYN verification for f <= 1 by running every single (agent, time) crash.
inline bool syn_verified_by_enumeration(const Instance& ins, const Solution& sol, int horizon) {
  SynCrashPattern none;
  none.crash_time.assign(ins.num_agents(), std::nullopt);
  if (!run_syn(ins, sol, none).outcome.ok()) return false;
  if (ins.f == 0) return true;
  for (AgentId a = 0; a < ins.num_agents(); ++a)
    for (int t = 1; t <= horizon; ++t) {
      SynCrashPattern p = none;
      p.crash_time[a] = t;
      if (!run_syn(ins, sol, p).outcome.ok()) return false;
    }
  return true;
}

/// Total number of vertices in all plans, a rough horizon for crash times.
inline int plan_horizon(const Solution& sol) {
  int h = 1;
  for (const auto& p : sol.plans)
    for (const auto& path : p.paths) h += static_cast<int>(path.size());
  return h;
}

}  // namespace oracle
