#pragma once

// Constrained single-agent search. Both variants minimize, in order:
// path length, entries into penalty vertices, entries into secondary penalty
// vertices, and finally the vertex-id sequence (lexicographically).

#include <cstdint>
#include <numeric>
#include <algorithm>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mappcf/core.hpp"

namespace mappcf {

/// A path anchored in global time: vertex k (1-based) is occupied at
/// time offset + k. Primary paths have offset 0.
struct TimedPath {
  Path path;
  int offset = 0;

  int time_of(int index) const { return offset + index; }
  int end_time() const { return offset + static_cast<int>(path.size()); }
  Vertex at_time(int t) const {
    int k = t - offset;
    if (k < 1) return path.front();
    if (k > static_cast<int>(path.size())) return path.back();
    return path[k - 1];
  }
};

/// Vertex/edge occupancies of already planned timed paths. A path's final
/// vertex stays occupied for every time after its end.
class ReservationTable {
 public:
  void add(const TimedPath& tp) {
    const int len = static_cast<int>(tp.path.size());
    for (int k = 1; k <= len; ++k) {
      Vertex v = tp.path[k - 1];
      int t = tp.time_of(k);
      vertex_.insert(key(v, t));
      auto [it, fresh] = last_time_.try_emplace(v, t);
      if (!fresh) it->second = std::max(it->second, t);
      if (k > 1 && tp.path[k - 2] != v) move_.insert(edge_key(tp.path[k - 2], v, t - 1));
    }
    auto [it, fresh] = parked_.try_emplace(tp.path.back(), tp.end_time());
    if (!fresh) it->second = std::min(it->second, tp.end_time());
    max_time_ = std::max(max_time_, tp.end_time());
  }

  bool occupied(Vertex v, int t) const {
    if (auto it = parked_.find(v); it != parked_.end() && it->second <= t) return true;
    return vertex_.count(key(v, t)) != 0;
  }

  /// Would moving u -> v between t and t+1 swap with a reserved agent?
  bool swap_conflict(Vertex u, Vertex v, int t) const { return move_.count(edge_key(v, u, t)) != 0; }

  /// True when nothing is reserved on v at any time >= t.
  bool free_from(Vertex v, int t) const {
    if (parked_.count(v)) return false;
    auto it = last_time_.find(v);
    return it == last_time_.end() || it->second < t;
  }

  int max_time() const { return max_time_; }

 private:
  static std::uint64_t key(Vertex v, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) | static_cast<std::uint32_t>(t);
  }
  static std::uint64_t edge_key(Vertex u, Vertex v, int t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 42) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 21) ^ static_cast<std::uint32_t>(t);
  }

  std::unordered_set<std::uint64_t> vertex_;
  std::unordered_set<std::uint64_t> move_;
  std::unordered_map<Vertex, int> parked_;
  std::unordered_map<Vertex, int> last_time_;
  int max_time_ = 0;
};

struct SynConstraints {
  std::vector<Vertex> blocked_forever;  // crashed-agent locations
  ReservationTable reserved;
  int crash_budget = 0;  // only widens the search horizon
};

struct SeqConstraints {
  std::vector<Vertex> forbidden_vertices;
};

struct Penalty {
  std::vector<Vertex> shared;     // vertices used by other agents' paths
  std::vector<Vertex> secondary;  // other agents' start vertices
};

/// Entries into penalty vertices along a path (waits do not re-count).
inline int count_entries(const Path& p, const std::vector<Vertex>& vs) {
  std::unordered_set<Vertex> s(vs.begin(), vs.end());
  int c = 0;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k] != p[k - 1] && s.count(p[k])) ++c;
  return c;
}

namespace detail {

struct Cost {
  int shared = 0;
  int secondary = 0;
  auto operator<=>(const Cost&) const = default;
};

inline std::vector<char> mask_of(int n, const std::vector<Vertex>& vs) {
  std::vector<char> m(n, 0);
  for (Vertex v : vs)
    if (v >= 0 && v < n) m[v] = 1;
  return m;
}

/// Layered dynamic program shared by both searches. `allowed(u, v, layer)`
/// says whether the step u -> v from layer to layer+1 is legal (u == v for a
/// wait). `accept(v, layer)` says whether reaching v at layer terminates.
/// Returns the vertex sequence from start to the accepting state.
template <class Allowed, class Accept>
std::optional<Path> layered_search(const Graph& g, Vertex start, int max_layers, bool allow_waits,
                                   const Penalty& penalty, Allowed&& allowed, Accept&& accept,
                                   const Deadline& deadline) {
  const int n = g.num_vertices();
  const auto shared = mask_of(n, penalty.shared);
  const auto secondary = mask_of(n, penalty.secondary);
  constexpr int kUnreached = -1;

  std::vector<int> reached_now{start};
  std::vector<Cost> cost(n), next_cost(n);
  std::vector<int> rank(n, kUnreached), next_rank(n, kUnreached);
  std::vector<std::vector<int>> preds;  // preds[layer][v]
  rank[start] = 0;
  preds.emplace_back(n, kUnreached);

  for (int layer = 0; layer <= max_layers; ++layer) {
    if (accept(start, layer) && layer == 0) return Path{start};
    if (layer == max_layers || reached_now.empty()) break;
    if ((layer & 15) == 0 && deadline.expired()) return std::nullopt;

    std::vector<int> pred_next(n, kUnreached);
    std::fill(next_rank.begin(), next_rank.end(), kUnreached);
    std::vector<int> reached_next;
    auto relax = [&](Vertex u, Vertex v) {
      if (!allowed(u, v, layer)) return;
      Cost c = cost[u];
      if (u != v) {
        c.shared += shared[v];
        c.secondary += secondary[v];
      }
      if (pred_next[v] == kUnreached) {
        reached_next.push_back(v);
      } else {
        int p = pred_next[v];
        if (std::tie(next_cost[v], rank[p]) <= std::tie(c, rank[u])) return;
      }
      pred_next[v] = u;
      next_cost[v] = c;
    };
    for (Vertex u : reached_now) {
      if (allow_waits) relax(u, u);
      for (Vertex v : g.neighbors(u)) relax(u, v);
    }
    // rank the chosen sequences lexicographically: by predecessor rank, then id
    std::sort(reached_next.begin(), reached_next.end(), [&](Vertex a, Vertex b) {
      return std::pair(rank[pred_next[a]], a) < std::pair(rank[pred_next[b]], b);
    });
    for (std::size_t r = 0; r < reached_next.size(); ++r) next_rank[reached_next[r]] = static_cast<int>(r);
    std::swap(rank, next_rank);
    std::swap(cost, next_cost);
    reached_now = std::move(reached_next);
    preds.push_back(std::move(pred_next));

    const int cur = layer + 1;
    Vertex hit = kUnreached;
    for (Vertex v : reached_now)
      if (accept(v, cur)) {
        hit = v;
        break;
      }
    if (hit != kUnreached) {
      Path out(cur + 1);
      Vertex v = hit;
      for (int l = cur; l >= 0; --l) {
        out[l] = v;
        if (l > 0) v = preds[l][v];
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Search horizon (absolute timestep) for a synchronous query.
inline int syn_horizon(const Graph& g, const SynConstraints& c) {
  return g.num_vertices() + c.reserved.max_time() + c.crash_budget * g.num_vertices();
}

/// Timed, wait-allowed path from (start, start_time) to goal. The k-th vertex
/// is occupied at start_time + k - 1. The goal must be free of reservations
/// from the arrival time on, since the agent stays there.
inline std::optional<Path> find_path_syn(const Graph& g, Vertex start, int start_time, Vertex goal,
                                         const SynConstraints& c, const Penalty& penalty = {},
                                         const Deadline& deadline = Deadline::never()) {
  const auto blocked = detail::mask_of(g.num_vertices(), c.blocked_forever);
  if (blocked[start] || blocked[goal]) return std::nullopt;
  const int horizon = syn_horizon(g, c);
  const int max_layers = std::max(0, horizon - start_time);
  const auto& res = c.reserved;
  auto allowed = [&](Vertex u, Vertex v, int layer) {
    const int t = start_time + layer;
    if (blocked[v] || res.occupied(v, t + 1)) return false;
    return u == v || !res.swap_conflict(u, v, t);
  };
  auto accept = [&](Vertex v, int layer) { return v == goal && res.free_from(goal, start_time + layer); };
  return detail::layered_search(g, start, max_layers, true, penalty, allowed, accept, deadline);
}

/// Simple shortest path avoiding forbidden vertices.
inline std::optional<Path> find_path_seq(const Graph& g, Vertex start, Vertex goal, const SeqConstraints& c,
                                         const Penalty& penalty = {},
                                         const Deadline& deadline = Deadline::never()) {
  auto forbidden = detail::mask_of(g.num_vertices(), c.forbidden_vertices);
  if (forbidden[start] || forbidden[goal]) return std::nullopt;
  // restrict moves to the shortest-path DAG so every candidate is simple
  std::vector<int> dist(g.num_vertices(), -1);
  {
    std::vector<Vertex> frontier{start};
    dist[start] = 0;
    while (!frontier.empty()) {
      std::vector<Vertex> next;
      for (Vertex u : frontier)
        for (Vertex v : g.neighbors(u))
          if (dist[v] < 0 && !forbidden[v]) {
            dist[v] = dist[u] + 1;
            next.push_back(v);
          }
      frontier = std::move(next);
    }
  }
  if (dist[goal] < 0) return std::nullopt;
  auto allowed = [&](Vertex u, Vertex v, int) { return u != v && !forbidden[v] && dist[v] == dist[u] + 1; };
  auto accept = [&](Vertex v, int) { return v == goal; };
  return detail::layered_search(g, start, dist[goal], false, penalty, allowed, accept, deadline);
}

/// Do two timed paths collide (vertex or swap), including parking at ends?
inline bool timed_paths_collide(const TimedPath& a, const TimedPath& b) {
  const int t0 = std::max(a.offset + 1, b.offset + 1);
  const int t1 = std::max(a.end_time(), b.end_time());
  for (int t = t0; t <= t1; ++t) {
    if (a.at_time(t) == b.at_time(t)) return true;
    if (t > t0 && a.at_time(t) == b.at_time(t - 1) && b.at_time(t) == a.at_time(t - 1) &&
        a.at_time(t) != a.at_time(t - 1))
      return true;
  }
  return false;
}

}  // namespace mappcf
