#pragma once

// Domain types shared by every mappcf component: graphs, instances, plans,
// solutions, plus instance validation and the necessary-condition check.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mappcf {

using Vertex = int;
using AgentId = int;
using Path = std::vector<Vertex>;

class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an edge list. Undirected edges are stored in both
  /// directions; neighbor lists are sorted and deduplicated.
  Graph(int num_vertices, const std::vector<std::pair<Vertex, Vertex>>& edges,
        bool directed = false)
      : adj_(static_cast<std::size_t>(std::max(num_vertices, 0))),
        directed_(directed) {
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
        throw std::out_of_range("edge endpoint out of range");
      adj_[u].push_back(v);
      if (!directed) adj_[v].push_back(u);
    }
    for (auto& nbrs : adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  /// Raw adjacency constructor; no normalization, so validate() may report
  /// broken invariants.
  static Graph from_adjacency(std::vector<std::vector<Vertex>> adj, bool directed) {
    Graph g;
    g.adj_ = std::move(adj);
    g.directed_ = directed;
    return g;
  }

  int num_vertices() const { return static_cast<int>(adj_.size()); }
  bool directed() const { return directed_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }
  const std::vector<std::vector<Vertex>>& adjacency() const { return adj_; }
  bool contains(Vertex v) const { return v >= 0 && v < num_vertices(); }

  bool has_edge(Vertex u, Vertex v) const {
    if (!contains(u)) return false;
    const auto& n = adj_[u];
    return std::binary_search(n.begin(), n.end(), v) ||
           std::find(n.begin(), n.end(), v) != n.end();
  }

  /// Edge list with each undirected edge reported once (u < v).
  std::vector<std::pair<Vertex, Vertex>> edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    for (Vertex u = 0; u < num_vertices(); ++u)
      for (Vertex v : adj_[u])
        if (directed_ || u < v) out.emplace_back(u, v);
    return out;
  }

  std::size_t num_edges() const { return edges().size(); }

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::vector<Vertex>> adj_;
  bool directed_ = false;
};

struct Instance {
  Graph graph;
  std::vector<Vertex> starts;
  std::vector<Vertex> goals;
  int f = 0;

  int num_agents() const { return static_cast<int>(starts.size()); }
  bool operator==(const Instance&) const = default;
};

enum class Model { Syn, Seq };
enum class FdMode { Nfd, Afd };

inline const char* to_string(Model m) { return m == Model::Syn ? "syn" : "seq"; }
inline const char* to_string(FdMode m) { return m == FdMode::Nfd ? "nfd" : "afd"; }

/// Failure-detector reading for one neighboring vertex.
struct Observation {
  enum class Kind { Vacant, Correct, CrashedAnon, Crashed };
  Kind kind = Kind::Vacant;
  AgentId agent = -1;  // only meaningful for Crashed

  static Observation vacant() { return {Kind::Vacant, -1}; }
  static Observation correct() { return {Kind::Correct, -1}; }
  static Observation crashed_anon() { return {Kind::CrashedAnon, -1}; }
  static Observation crashed(AgentId a) { return {Kind::Crashed, a}; }

  bool operator==(const Observation& o) const {
    return kind == o.kind && (kind != Kind::Crashed || agent == o.agent);
  }
};

inline std::string to_string(const Observation& o) {
  switch (o.kind) {
    case Observation::Kind::Vacant: return "vacant";
    case Observation::Kind::Correct: return "correct";
    case Observation::Kind::CrashedAnon: return "crashed";
    case Observation::Kind::Crashed: return "crashed(" + std::to_string(o.agent) + ")";
  }
  return "?";
}

/// "When executing from_path at progress index at_index and the detector
/// reports trigger for watch_vertex, switch to to_path."
struct TransitionRule {
  int from_path = 0;
  int at_index = 1;  // 1-based progress index
  Vertex watch_vertex = 0;
  Observation trigger;
  int to_path = 0;

  bool operator==(const TransitionRule&) const = default;
};

struct Plan {
  std::vector<Path> paths;  // paths[0] is the primary path
  std::vector<TransitionRule> rules;

  bool operator==(const Plan&) const = default;
};

struct Solution {
  std::vector<Plan> plans;
  Model model = Model::Syn;
  FdMode fd_mode = FdMode::Nfd;

  bool operator==(const Solution&) const = default;
};

/// Wraps single-path plans (no rules) into a solution.
inline Solution solution_from_paths(const std::vector<Path>& paths, Model model,
                                    FdMode fd = FdMode::Nfd) {
  Solution s;
  s.model = model;
  s.fd_mode = fd;
  for (const auto& p : paths) s.plans.push_back(Plan{{p}, {}});
  return s;
}

/// Cooperative wall-clock budget polled by the solvers.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;
  Deadline() : end_(Clock::time_point::max()) {}
  explicit Deadline(std::chrono::duration<double> budget)
      : end_(Clock::now() + std::chrono::duration_cast<Clock::duration>(budget)) {}
  static Deadline never() { return Deadline(); }
  bool expired() const { return end_ != Clock::time_point::max() && Clock::now() >= end_; }

 private:
  Clock::time_point end_;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationTag {
  NoAgents,
  StartGoalCountMismatch,
  NegativeCrashBudget,
  VertexOutOfRange,
  DuplicateStart,
  DuplicateGoal,
  NeighborOutOfRange,
  SelfLoop,
  AsymmetricAdjacency,
};

inline const char* to_string(ViolationTag t) {
  switch (t) {
    case ViolationTag::NoAgents: return "NoAgents";
    case ViolationTag::StartGoalCountMismatch: return "StartGoalCountMismatch";
    case ViolationTag::NegativeCrashBudget: return "NegativeCrashBudget";
    case ViolationTag::VertexOutOfRange: return "VertexOutOfRange";
    case ViolationTag::DuplicateStart: return "DuplicateStart";
    case ViolationTag::DuplicateGoal: return "DuplicateGoal";
    case ViolationTag::NeighborOutOfRange: return "NeighborOutOfRange";
    case ViolationTag::SelfLoop: return "SelfLoop";
    case ViolationTag::AsymmetricAdjacency: return "AsymmetricAdjacency";
  }
  return "?";
}

struct Violation {
  ViolationTag tag;
  std::string detail;
};

inline std::vector<Violation> validate_instance(const Instance& ins) {
  std::vector<Violation> out;
  const Graph& g = ins.graph;
  for (Vertex u = 0; u < g.num_vertices(); ++u) {
    for (Vertex v : g.neighbors(u)) {
      if (!g.contains(v)) {
        out.push_back({ViolationTag::NeighborOutOfRange,
                       "vertex " + std::to_string(u) + " lists " + std::to_string(v)});
        continue;
      }
      if (u == v) out.push_back({ViolationTag::SelfLoop, "vertex " + std::to_string(u)});
      if (!g.directed() && !g.has_edge(v, u))
        out.push_back({ViolationTag::AsymmetricAdjacency,
                       std::to_string(u) + "->" + std::to_string(v)});
    }
  }
  if (ins.starts.empty() && ins.goals.empty())
    out.push_back({ViolationTag::NoAgents, ""});
  if (ins.starts.size() != ins.goals.size())
    out.push_back({ViolationTag::StartGoalCountMismatch,
                   std::to_string(ins.starts.size()) + " starts, " +
                       std::to_string(ins.goals.size()) + " goals"});
  if (ins.f < 0) out.push_back({ViolationTag::NegativeCrashBudget, std::to_string(ins.f)});

  auto check_list = [&](const std::vector<Vertex>& vs, ViolationTag dup, const char* what) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (!g.contains(vs[i]))
        out.push_back({ViolationTag::VertexOutOfRange,
                       std::string(what) + " of agent " + std::to_string(i)});
      for (std::size_t j = 0; j < i; ++j)
        if (vs[i] == vs[j])
          out.push_back({dup, "agents " + std::to_string(j) + " and " + std::to_string(i)});
    }
  };
  check_list(ins.starts, ViolationTag::DuplicateStart, "start");
  check_list(ins.goals, ViolationTag::DuplicateGoal, "goal");
  return out;
}

inline bool is_valid(const Instance& ins) { return validate_instance(ins).empty(); }

/// Consecutive entries equal (a wait) or joined by an edge.
inline bool path_follows_graph(const Graph& g, const Path& p, bool allow_waits = true) {
  if (p.empty()) return false;
  for (Vertex v : p)
    if (!g.contains(v)) return false;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] == p[k - 1]) {
      if (!allow_waits) return false;
    } else if (!g.has_edge(p[k - 1], p[k])) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Reachability helpers

/// BFS reachability from src to dst, never entering a vertex in `avoid`.
/// src itself must be enterable; returns false if src or dst is avoided.
inline bool reachable_avoiding(const Graph& g, Vertex src, Vertex dst,
                               const std::vector<char>& avoid) {
  if (avoid[src] || avoid[dst]) return false;
  if (src == dst) return true;
  std::vector<char> seen(g.num_vertices(), 0);
  std::queue<Vertex> q;
  q.push(src);
  seen[src] = 1;
  while (!q.empty()) {
    Vertex u = q.front();
    q.pop();
    for (Vertex v : g.neighbors(u)) {
      if (seen[v] || avoid[v]) continue;
      if (v == dst) return true;
      seen[v] = 1;
      q.push(v);
    }
  }
  return false;
}

/// BFS distances (hop counts) from src; -1 when unreachable.
inline std::vector<int> bfs_distances(const Graph& g, Vertex src) {
  std::vector<int> d(g.num_vertices(), -1);
  std::queue<Vertex> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    Vertex u = q.front();
    q.pop();
    for (Vertex v : g.neighbors(u))
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push(v);
      }
  }
  return d;
}

namespace detail {

/// Minimum number of "cuttable" vertices whose removal disconnects src from
/// dst, capped at limit+1. Non-cuttable vertices have unbounded capacity;
/// src and dst are never cut here (callers handle those cases).
inline int min_vertex_cut(const Graph& g, Vertex src, Vertex dst,
                          const std::vector<char>& cuttable, int limit) {
  const int n = g.num_vertices();
  const int inf = std::numeric_limits<int>::max() / 4;
  // node v splits into in = 2v, out = 2v+1
  struct Arc {
    int to, cap;
  };
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> out(2 * n);
  auto add = [&](int a, int b, int c) {
    out[a].push_back(static_cast<int>(arcs.size()));
    arcs.push_back({b, c});
    out[b].push_back(static_cast<int>(arcs.size()));
    arcs.push_back({a, 0});
  };
  for (Vertex v = 0; v < n; ++v) add(2 * v, 2 * v + 1, (cuttable[v] && v != src && v != dst) ? 1 : inf);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u)) add(2 * u + 1, 2 * v, inf);

  const int s = 2 * src + 1, t = 2 * dst;
  int flow = 0;
  while (flow <= limit) {
    std::vector<int> via(2 * n, -1);
    std::queue<int> q;
    q.push(s);
    via[s] = -2;
    while (!q.empty() && via[t] == -1) {
      int x = q.front();
      q.pop();
      for (int id : out[x])
        if (arcs[id].cap > 0 && via[arcs[id].to] == -1) {
          via[arcs[id].to] = id;
          q.push(arcs[id].to);
        }
    }
    if (via[t] == -1) break;
    int bottleneck = inf;
    for (int x = t; x != s; x = arcs[via[x] ^ 1].to) bottleneck = std::min(bottleneck, arcs[via[x]].cap);
    if (bottleneck >= inf) return limit + 1;  // uncuttable connection
    for (int x = t; x != s; x = arcs[via[x] ^ 1].to) {
      arcs[via[x]].cap -= bottleneck;
      arcs[via[x] ^ 1].cap += bottleneck;
    }
    flow += bottleneck;
  }
  return flow;
}

}  // namespace detail

struct NecessaryCheck {
  std::vector<bool> goal_condition;
  std::vector<bool> start_condition;
  bool holds = true;
};

/// Necessary condition for any solution to exist: every agent can reach its
/// goal without touching another agent's goal, and without touching the
/// starts of any min(f, n-1) other agents.
///
/// The start condition is decided as a min vertex cut restricted to other
/// agents' starts: it fails iff some set of at most f other starts separates
/// s_i from g_i (padding to exactly f never reconnects the graph).
inline NecessaryCheck check_necessary(const Instance& ins) {
  const int n = ins.num_agents();
  const Graph& g = ins.graph;
  NecessaryCheck res;
  res.goal_condition.assign(n, true);
  res.start_condition.assign(n, true);
  const int budget = std::min(ins.f, n - 1);

  for (AgentId i = 0; i < n; ++i) {
    std::vector<char> other_goals(g.num_vertices(), 0), other_starts(g.num_vertices(), 0);
    for (AgentId j = 0; j < n; ++j) {
      if (j == i) continue;
      other_goals[ins.goals[j]] = 1;
      other_starts[ins.starts[j]] = 1;
    }
    res.goal_condition[i] = reachable_avoiding(g, ins.starts[i], ins.goals[i], other_goals);

    std::vector<char> none(g.num_vertices(), 0);
    if (budget <= 0) {
      res.start_condition[i] = reachable_avoiding(g, ins.starts[i], ins.goals[i], none);
    } else if (other_starts[ins.goals[i]]) {
      res.start_condition[i] = false;  // blocking the goal itself costs one crash
    } else if (ins.starts[i] == ins.goals[i]) {
      res.start_condition[i] = true;
    } else {
      if (!reachable_avoiding(g, ins.starts[i], ins.goals[i], none)) {
        res.start_condition[i] = false;
      } else {
        int cut = detail::min_vertex_cut(g, ins.starts[i], ins.goals[i], other_starts, budget);
        res.start_condition[i] = cut > budget;
      }
    }
    res.holds = res.holds && res.goal_condition[i] && res.start_condition[i];
  }
  return res;
}

}  // namespace mappcf
