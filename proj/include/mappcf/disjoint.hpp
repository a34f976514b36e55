#pragma once

// Baseline: pairwise vertex-disjoint paths found by conflict-based search.
// Each conflict on a shared vertex splits into "agent a avoids v" and
// "agent b avoids v".

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "mappcf/core.hpp"
#include "mappcf/pathfind.hpp"

namespace mappcf {

struct DisjointResult {
  enum class Kind { Solved, Infeasible, Timeout };
  Kind kind = Kind::Infeasible;
  std::vector<Path> paths;
  std::size_t nodes = 0;

  bool solved() const { return kind == Kind::Solved; }
};

inline const char* to_string(DisjointResult::Kind k) {
  switch (k) {
    case DisjointResult::Kind::Solved: return "solved";
    case DisjointResult::Kind::Infeasible: return "infeasible";
    case DisjointResult::Kind::Timeout: return "timeout";
  }
  return "?";
}

namespace detail {

struct CbsNode {
  std::vector<std::vector<Vertex>> forbidden;  // per agent
  std::vector<Path> paths;
  int cost = 0;
  int conflicts = 0;
};

/// Every (a, b, v) with a < b both using v, ordered by a, then v's position on a's path.
inline std::vector<std::tuple<AgentId, AgentId, Vertex>> all_conflicts(const std::vector<Path>& paths,
                                                                       int num_vertices) {
  std::vector<std::vector<AgentId>> users(num_vertices);
  for (AgentId a = 0; a < static_cast<AgentId>(paths.size()); ++a)
    for (Vertex v : paths[a])
      if (users[v].empty() || users[v].back() != a) users[v].push_back(a);
  std::vector<std::tuple<AgentId, AgentId, Vertex>> out;
  std::vector<char> done(num_vertices, 0);
  for (AgentId a = 0; a < static_cast<AgentId>(paths.size()); ++a)
    for (Vertex v : paths[a]) {
      if (done[v] || users[v].size() < 2 || users[v].front() != a) continue;
      done[v] = 1;
      for (std::size_t k = 1; k < users[v].size(); ++k) out.emplace_back(a, users[v][k], v);
    }
  return out;
}

inline int count_conflicts(const std::vector<Path>& paths, int num_vertices) {
  std::vector<int> users(num_vertices, 0);
  for (const auto& p : paths) {
    std::vector<char> seen(num_vertices, 0);
    for (Vertex v : p)
      if (!seen[v]) {
        seen[v] = 1;
        ++users[v];
      }
  }
  int c = 0;
  for (int u : users) c += u > 1 ? u - 1 : 0;
  return c;
}

inline std::optional<Path> disjoint_low_level(const Instance& ins, AgentId a, const std::vector<Vertex>& extra,
                                              const std::vector<Path>& current, const Deadline& deadline) {
  SeqConstraints c;
  c.forbidden_vertices = extra;
  Penalty pen;
  for (AgentId b = 0; b < ins.num_agents(); ++b) {
    if (b == a) continue;
    c.forbidden_vertices.push_back(ins.starts[b]);
    c.forbidden_vertices.push_back(ins.goals[b]);
    if (b < static_cast<AgentId>(current.size()))
      pen.shared.insert(pen.shared.end(), current[b].begin(), current[b].end());
  }
  return find_path_seq(ins.graph, ins.starts[a], ins.goals[a], c, pen, deadline);
}

/// Vertices of `through` other than its ends whose removal disconnects its
/// ends. On undirected graphs a vertex is avoidable exactly when some
/// component of the graph minus the path, or a chord, joins an earlier and a
/// later path vertex around it.
inline std::vector<Vertex> mandatory_vertices(const Graph& g, const Path& through, std::vector<char> blocked) {
  std::vector<Vertex> out;
  const int len = static_cast<int>(through.size());
  if (g.directed()) {
    for (int k = 1; k + 1 < len; ++k) {
      const Vertex v = through[k];
      blocked[v] = 1;
      if (!reachable_avoiding(g, through.front(), through.back(), blocked)) out.push_back(v);
      blocked[v] = 0;
    }
    return out;
  }
  const int nv = g.num_vertices();
  std::vector<int> index(nv, -1);
  for (int k = 0; k < len; ++k) index[through[k]] = k;
  std::vector<int> reach(len + 1, 0);  // reach[k]: furthest index reachable around position k
  std::vector<char> seen(nv, 0);
  auto cover = [&](int lo, int hi) {
    if (hi > lo + 1) reach[lo] = std::max(reach[lo], hi);
  };
  for (int k = 0; k < len; ++k)
    for (Vertex w : g.neighbors(through[k]))
      if (index[w] > k) cover(k, index[w]);
  for (Vertex r = 0; r < nv; ++r) {
    if (seen[r] || blocked[r] || index[r] >= 0) continue;
    int lo = len, hi = -1;
    std::vector<Vertex> stack{r};
    seen[r] = 1;
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : g.neighbors(u)) {
        if (index[w] >= 0) {
          lo = std::min(lo, index[w]);
          hi = std::max(hi, index[w]);
        } else if (!seen[w] && !blocked[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    if (hi >= 0) cover(lo, hi);
  }
  int furthest = 0;
  for (int k = 1; k + 1 < len; ++k) {
    furthest = std::max(furthest, reach[k - 1]);
    if (furthest <= k) out.push_back(through[k]);
  }
  return out;
}

/// Forbids, for every agent, the vertices that another agent cannot avoid,
/// until nothing changes, replanning paths that became invalid. Only agents
/// flagged in `dirty` (whose constraints changed) are re-examined. False
/// when some agent is left without a path.
inline bool settle(const Instance& ins, CbsNode& node, std::vector<char> dirty, const Deadline& deadline) {
  const int n = ins.num_agents();
  const int nv = ins.graph.num_vertices();
  for (AgentId a = 0; a < n;) {
    if (!dirty[a]) {
      ++a;
      continue;
    }
    dirty[a] = 0;
    if (deadline.expired()) return false;
    std::vector<char> blocked(nv, 0);
    for (Vertex v : node.forbidden[a]) blocked[v] = 1;
    for (AgentId b = 0; b < n; ++b)
      if (b != a) blocked[ins.starts[b]] = blocked[ins.goals[b]] = 1;
    const Path& cur = node.paths[a];
    if (std::any_of(cur.begin(), cur.end(), [&](Vertex v) { return blocked[v] != 0; })) {
      auto p = disjoint_low_level(ins, a, node.forbidden[a], node.paths, deadline);
      if (!p) return false;
      node.paths[a] = std::move(*p);
    }
    for (Vertex v : mandatory_vertices(ins.graph, node.paths[a], blocked))
      for (AgentId b = 0; b < n; ++b) {
        if (b == a) continue;
        auto& fb = node.forbidden[b];
        if (std::find(fb.begin(), fb.end(), v) != fb.end()) continue;
        fb.push_back(v);
        dirty[b] = 1;
      }
    a = 0;
  }
  node.cost = 0;
  for (const auto& p : node.paths) node.cost += static_cast<int>(p.size()) - 1;
  node.conflicts = count_conflicts(node.paths, nv);
  return true;
}

}  // namespace detail

inline DisjointResult solve_disjoint(const Instance& ins, const Deadline& deadline = Deadline::never()) {
  using detail::CbsNode;
  DisjointResult res;
  const int n = ins.num_agents();
  const int nv = ins.graph.num_vertices();

  CbsNode root;
  root.forbidden.resize(n);
  for (AgentId a = 0; a < n; ++a) {
    auto p = detail::disjoint_low_level(ins, a, {}, root.paths, deadline);
    if (!p) {
      res.kind = deadline.expired() ? DisjointResult::Kind::Timeout : DisjointResult::Kind::Infeasible;
      return res;
    }
    root.paths.push_back(std::move(*p));
  }
  auto finalize = [&](CbsNode& node) {
    node.cost = 0;
    for (const auto& p : node.paths) node.cost += static_cast<int>(p.size()) - 1;
    node.conflicts = detail::count_conflicts(node.paths, nv);
  };
  if (!detail::settle(ins, root, std::vector<char>(n, 1), deadline)) {
    res.kind = deadline.expired() ? DisjointResult::Kind::Timeout : DisjointResult::Kind::Infeasible;
    return res;
  }

  std::vector<CbsNode> nodes;
  using Key = std::tuple<int, int, std::size_t>;  // cost, conflicts, insertion
  std::priority_queue<Key, std::vector<Key>, std::greater<>> open;
  nodes.push_back(std::move(root));
  open.emplace(nodes[0].cost, nodes[0].conflicts, 0);

  // Conflicts are examined in order and the first one that lengthens both
  // agents is split on; a child that keeps the cost and lowers the conflict
  // count replaces the parent's path instead of branching.
  constexpr std::size_t kExamine = 8;
  while (!open.empty()) {
    if (deadline.expired()) {
      res.kind = DisjointResult::Kind::Timeout;
      return res;
    }
    auto [cost, conf, id] = open.top();
    open.pop();
    for (;;) {
      ++res.nodes;
      if (deadline.expired()) {
        res.kind = DisjointResult::Kind::Timeout;
        return res;
      }
      const auto conflicts = detail::all_conflicts(nodes[id].paths, nv);
      if (conflicts.empty()) {
        res.kind = DisjointResult::Kind::Solved;
        res.paths = nodes[id].paths;
        return res;
      }
      struct Split {
        AgentId a, b;
        Vertex v;
        std::optional<Path> child[2];
        int lengthened = -1;
      } best;
      bool bypassed = false;
      for (std::size_t c = 0; c < std::min(conflicts.size(), kExamine) && !bypassed; ++c) {
        auto [a, b, v] = conflicts[c];
        Split sp{a, b, v, {}, 0};
        for (int side = 0; side < 2; ++side) {
          const AgentId who = side ? b : a;
          const Path& cur = nodes[id].paths[who];
          if (v != ins.starts[who] && v != ins.goals[who]) {
            auto extra = nodes[id].forbidden[who];
            extra.push_back(v);
            sp.child[side] = detail::disjoint_low_level(ins, who, extra, nodes[id].paths, deadline);
          }
          if (!sp.child[side] || sp.child[side]->size() > cur.size()) {
            ++sp.lengthened;
            continue;
          }
          auto trial = nodes[id].paths;
          trial[who] = *sp.child[side];
          if (detail::count_conflicts(trial, nv) < nodes[id].conflicts) {
            nodes[id].paths[who] = std::move(*sp.child[side]);
            finalize(nodes[id]);
            bypassed = true;
            break;
          }
        }
        if (!bypassed && sp.lengthened > best.lengthened) best = std::move(sp);
        if (best.lengthened == 2) break;
      }
      if (bypassed) continue;
      for (int side = 0; side < 2; ++side) {
        if (!best.child[side]) continue;
        const AgentId who = side ? best.b : best.a;
        CbsNode child = nodes[id];
        child.forbidden[who].push_back(best.v);
        child.paths[who] = std::move(*best.child[side]);
        std::vector<char> dirty(n, 0);
        dirty[who] = 1;
        if (!detail::settle(ins, child, std::move(dirty), deadline)) continue;
        nodes.push_back(std::move(child));
        open.emplace(nodes.back().cost, nodes.back().conflicts, nodes.size() - 1);
      }
      break;
    }
  }
  res.kind = deadline.expired() ? DisjointResult::Kind::Timeout : DisjointResult::Kind::Infeasible;
  return res;
}

}  // namespace mappcf
