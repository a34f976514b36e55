#pragma once

// Decoupled crash-fault resolution. Plans one path per agent, then resolves
// crash/effect events one at a time by attaching backup paths guarded by
// failure-detector rules.

#include <chrono>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mappcf/core.hpp"
#include "mappcf/pathfind.hpp"

namespace mappcf {

constexpr int kUnconditional = -1;
constexpr AgentId kAnonymous = -1;

struct Crash {
  AgentId agent = kAnonymous;  // kAnonymous under AFD
  Vertex vertex = 0;
  int when = kUnconditional;   // timestep in SYN

  bool operator==(const Crash&) const = default;
};

struct Effect {
  AgentId agent = 0;
  int path = 0;
  Vertex vertex = 0;
  int at_index = 2;
  int time = 0;  // global time of at_index (SYN); equals at_index in SEQ

  bool operator==(const Effect&) const = default;
};

struct Event {
  Crash crash;
  Effect effect;

  bool operator==(const Event&) const = default;
};

/// Crash assumptions under which a path is executed.
using PathContext = std::vector<Crash>;

struct SolverConfig {
  Model model = Model::Syn;
  FdMode fd_mode = FdMode::Nfd;
  bool refine = true;
  int restarts = 10;
  double timeout_s = 30.0;
  std::uint64_t seed = 0;
  std::vector<AgentId> priority;  // empty: agent-id order
};

struct Failure {
  enum class Reason { InitPaths, NoBackup, Timeout };
  Reason reason;
  std::string detail;
};

inline const char* to_string(Failure::Reason r) {
  switch (r) {
    case Failure::Reason::InitPaths: return "init_paths";
    case Failure::Reason::NoBackup: return "no_backup";
    case Failure::Reason::Timeout: return "timeout";
  }
  return "?";
}

struct EventLogEntry {
  enum class Status { Resolved, Discarded, Unresolvable };
  Event event;
  Status status = Status::Resolved;
  int new_path = -1;
};

struct SolveResult {
  std::optional<Solution> solution;
  std::optional<Failure> failure;
  std::vector<EventLogEntry> log;
  std::vector<std::vector<PathContext>> contexts;  // per agent, per path
  std::vector<std::vector<int>> offsets;           // per agent, per path (SYN alignment)

  bool ok() const { return solution.has_value(); }
};

// ---------------------------------------------------------------------------
// Crash-assumption arithmetic

/// Two assumption sets can hold together iff no agent crashes at two
/// vertices, no vertex hosts two crashed agents, and at most f vertices are
/// blocked in total.
inline bool prune_inconsistent(const PathContext& a, const PathContext& b, int f) {
  std::map<AgentId, Vertex> where;
  std::map<Vertex, AgentId> who;
  for (const auto* ctx : {&a, &b})
    for (const auto& c : *ctx) {
      if (c.agent != kAnonymous) {
        auto [it, fresh] = where.try_emplace(c.agent, c.vertex);
        if (!fresh && it->second != c.vertex) return false;
      }
      auto [it, fresh] = who.try_emplace(c.vertex, c.agent);
      if (!fresh) {
        if (it->second == kAnonymous) it->second = c.agent;
        else if (c.agent != kAnonymous && c.agent != it->second) return false;
      }
    }
  return static_cast<int>(who.size()) <= f;
}

inline bool names_agent(const PathContext& ctx, AgentId a) {
  for (const auto& c : ctx)
    if (c.agent == a) return true;
  return false;
}

inline PathContext merge_contexts(const PathContext& a, const PathContext& b) {
  PathContext out = a;
  for (const auto& c : b) {
    bool dup = false;
    for (auto& o : out)
      if (o.vertex == c.vertex && (o.agent == c.agent || o.agent == kAnonymous || c.agent == kAnonymous)) {
        if (o.agent == kAnonymous) o.agent = c.agent;
        dup = true;
      }
    if (!dup) out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> path_vertex_set(const Path& p) {
  std::vector<int> s(p.begin(), p.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline int shared_count(const Path& a, const Path& b) {
  auto sa = path_vertex_set(a), sb = path_vertex_set(b);
  std::vector<int> out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out));
  return static_cast<int>(out.size());
}

inline int total_shared(const std::vector<Path>& paths) {
  int t = 0;
  for (std::size_t a = 0; a < paths.size(); ++a)
    for (std::size_t b = a + 1; b < paths.size(); ++b) t += shared_count(paths[a], paths[b]);
  return t;
}

inline std::vector<Vertex> others(const std::vector<Vertex>& vs, AgentId skip) {
  std::vector<Vertex> out;
  for (AgentId a = 0; a < static_cast<AgentId>(vs.size()); ++a)
    if (a != skip) out.push_back(vs[a]);
  return out;
}

}  // namespace detail

/// Plans one path per agent following `order`. SYN: prioritized timed
/// planning that avoids every other goal. SEQ: simple paths vertex-disjoint
/// from earlier paths and from every other start and goal.
inline std::optional<std::vector<Path>> plan_in_order(const Instance& ins, Model model,
                                                      const std::vector<AgentId>& order,
                                                      const Deadline& deadline = Deadline::never()) {
  const int n = ins.num_agents();
  std::vector<Path> paths(n);
  SynConstraints syn;
  syn.crash_budget = 0;
  std::vector<Vertex> used;
  for (AgentId a : order) {
    Penalty pen{used, detail::others(ins.starts, a)};
    std::optional<Path> p;
    if (model == Model::Syn) {
      SynConstraints c = syn;
      c.blocked_forever = detail::others(ins.goals, a);
      p = find_path_syn(ins.graph, ins.starts[a], 1, ins.goals[a], c, pen, deadline);
    } else {
      SeqConstraints c;
      c.forbidden_vertices = used;
      for (Vertex v : detail::others(ins.goals, a)) c.forbidden_vertices.push_back(v);
      for (Vertex v : detail::others(ins.starts, a)) c.forbidden_vertices.push_back(v);
      p = find_path_seq(ins.graph, ins.starts[a], ins.goals[a], c, pen, deadline);
    }
    if (!p) return std::nullopt;
    syn.reserved.add(TimedPath{*p, 0});
    used.insert(used.end(), p->begin(), p->end());
    paths[a] = std::move(*p);
  }
  return paths;
}

/// Initial plans with seeded random restarts on failure.
inline std::optional<std::vector<Path>> get_initial_plans(const Instance& ins, const SolverConfig& cfg,
                                                          const Deadline& deadline = Deadline::never()) {
  std::vector<AgentId> order = cfg.priority;
  if (order.empty()) {
    order.resize(ins.num_agents());
    std::iota(order.begin(), order.end(), 0);
  }
  std::mt19937_64 rng(cfg.seed);
  for (int attempt = 0; attempt <= cfg.restarts; ++attempt) {
    if (attempt > 0) std::shuffle(order.begin(), order.end(), rng);
    if (auto p = plan_in_order(ins, cfg.model, order, deadline)) return p;
    if (deadline.expired()) break;
  }
  return std::nullopt;
}

/// Round-robin replanning that lowers the number of vertices shared between
/// agents without lengthening anyone's path (SYN only).
inline std::vector<Path> refine_initial_paths(const Instance& ins, std::vector<Path> paths,
                                              const Deadline& deadline = Deadline::never()) {
  const int n = ins.num_agents();
  for (int pass = 0; pass < 2; ++pass) {
    bool changed = false;
    for (AgentId a = 0; a < n; ++a) {
      SynConstraints c;
      c.blocked_forever = detail::others(ins.goals, a);
      Penalty pen;
      pen.secondary = detail::others(ins.starts, a);
      for (AgentId b = 0; b < n; ++b)
        if (b != a) {
          c.reserved.add(TimedPath{paths[b], 0});
          pen.shared.insert(pen.shared.end(), paths[b].begin(), paths[b].end());
        }
      auto p = find_path_syn(ins.graph, ins.starts[a], 1, ins.goals[a], c, pen, deadline);
      if (!p || p->size() > paths[a].size()) continue;
      auto trial = paths;
      trial[a] = *p;
      if (detail::total_shared(trial) < detail::total_shared(paths)) {
        paths = std::move(trial);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return paths;
}

// ---------------------------------------------------------------------------
// The solver

class DcrfSolver {
 public:
  DcrfSolver(const Instance& ins, const SolverConfig& cfg)
      : ins_(ins),
        cfg_(cfg),
        deadline_(cfg.timeout_s > 0 ? Deadline(std::chrono::duration<double>(cfg.timeout_s)) : Deadline::never()) {
    const int n = ins.num_agents();
    paths_.resize(n);
    rules_.resize(n);
  }

  SolveResult solve() {
    SolveResult res;
    auto init = get_initial_plans(ins_, cfg_, deadline_);
    if (!init) return fail(res, deadline_.expired() ? Failure::Reason::Timeout : Failure::Reason::InitPaths, "");
    if (cfg_.model == Model::Syn && cfg_.refine) *init = refine_initial_paths(ins_, *init, deadline_);
    for (AgentId a = 0; a < ins_.num_agents(); ++a) paths_[a].push_back({TimedPath{(*init)[a], 0}, {}});

    for (const auto& e : get_initial_unresolved_events()) push(e);

    while (!queue_.empty()) {
      if (deadline_.expired()) return fail(res, Failure::Reason::Timeout, "");
      auto it = queue_.begin();
      Event ev = it->second;
      queue_.erase(it);
      const AgentId b = ev.effect.agent;
      TransitionRule rule{ev.effect.path, ev.effect.at_index - 1, ev.crash.vertex, trigger_for(ev.crash), -1};
      if (has_rule(b, rule)) {
        log_.push_back({ev, EventLogEntry::Status::Discarded, -1});
        continue;
      }
      PathContext ctx = context_for(ev);
      auto backup = find_backup_path(ev, ctx);
      if (!backup) {
        log_.push_back({ev, EventLogEntry::Status::Unresolvable, -1});
        return fail(res, deadline_.expired() ? Failure::Reason::Timeout : Failure::Reason::NoBackup,
                    "agent " + std::to_string(b) + " at vertex " + std::to_string(ev.crash.vertex));
      }
      rule.to_path = static_cast<int>(paths_[b].size());
      paths_[b].push_back({*backup, ctx});
      rules_[b].push_back(rule);
      log_.push_back({ev, EventLogEntry::Status::Resolved, rule.to_path});
      for (const auto& e : get_new_unresolved_events(b, rule.to_path)) push(e);
    }

    Solution sol;
    sol.model = cfg_.model;
    sol.fd_mode = cfg_.fd_mode;
    for (AgentId a = 0; a < ins_.num_agents(); ++a) {
      Plan p;
      for (const auto& rec : paths_[a]) p.paths.push_back(rec.timed.path);
      p.rules = rules_[a];
      sol.plans.push_back(std::move(p));
    }
    res.solution = std::move(sol);
    finish(res);
    return res;
  }

  /// Events among the current (primary) paths, in queue order.
  std::vector<Event> get_initial_unresolved_events() const {
    std::vector<Event> out;
    const int n = ins_.num_agents();
    for (AgentId b = 0; b < n; ++b)
      for (AgentId a = 0; a < n; ++a)
        if (a != b) events_between(a, 0, b, 0, out);
    std::stable_sort(out.begin(), out.end(), [](const Event& x, const Event& y) { return order_key(x) < order_key(y); });
    return out;
  }

  /// Backup for the affected agent: starts one step before the effect and
  /// avoids every assumed crash location for good.
  std::optional<TimedPath> find_backup_path(const Event& ev, const PathContext& ctx) const {
    const AgentId b = ev.effect.agent;
    const TimedPath& q = paths_[b][ev.effect.path].timed;
    const int k = ev.effect.at_index - 1;
    const Vertex start = q.path[k - 1];
    const int start_time = q.time_of(k);

    if (cfg_.model == Model::Seq) {
      SeqConstraints c;
      Penalty pen;
      for (const auto& cr : ctx) c.forbidden_vertices.push_back(cr.vertex);
      for (AgentId a = 0; a < ins_.num_agents(); ++a) {
        if (a == b) continue;
        if (!names_agent(ctx, a)) c.forbidden_vertices.push_back(ins_.goals[a]);
        c.forbidden_vertices.push_back(ins_.starts[a]);
        for (const auto& rec : paths_[a])
          if (coexists(a, rec, b, ctx)) c.forbidden_vertices.insert(c.forbidden_vertices.end(), rec.timed.path.begin(),
                                                                    rec.timed.path.end());
      }
      // the agent's own position is never forbidden
      std::erase(c.forbidden_vertices, start);
      auto p = find_path_seq(ins_.graph, start, ins_.goals[b], c, pen, deadline_);
      if (!p) return std::nullopt;
      return TimedPath{*p, q.offset + k - 1};
    }

    SynConstraints c;
    c.crash_budget = ins_.f;
    Penalty pen;
    for (const auto& cr : ctx) c.blocked_forever.push_back(cr.vertex);
    for (AgentId a = 0; a < ins_.num_agents(); ++a) {
      if (a == b) continue;
      if (!names_agent(ctx, a)) c.blocked_forever.push_back(ins_.goals[a]);
      pen.secondary.push_back(ins_.starts[a]);
      for (const auto& rec : paths_[a])
        if (coexists(a, rec, b, ctx)) {
          c.reserved.add(rec.timed);
          pen.shared.insert(pen.shared.end(), rec.timed.path.begin(), rec.timed.path.end());
        }
    }
    auto p = find_path_syn(ins_.graph, start, start_time, ins_.goals[b], c, pen, deadline_);
    if (!p) return std::nullopt;
    return TimedPath{*p, start_time - 1};
  }

  /// Events between a freshly added path and every other agent's paths, in
  /// both directions.
  std::vector<Event> get_new_unresolved_events(AgentId b, int path) const {
    std::vector<Event> out;
    for (AgentId a = 0; a < ins_.num_agents(); ++a) {
      if (a == b) continue;
      for (int p = 0; p < static_cast<int>(paths_[a].size()); ++p) {
        events_between(a, p, b, path, out);
        events_between(b, path, a, p, out);
      }
    }
    return out;
  }

  const std::vector<EventLogEntry>& log() const { return log_; }

 private:
  struct PathRecord {
    TimedPath timed;
    PathContext context;
  };

  using QueueKey = std::tuple<int, AgentId, AgentId, long>;

  static std::tuple<int, AgentId, AgentId> order_key(const Event& e) {
    return {e.effect.time, e.effect.agent, e.crash.agent};
  }

  Observation trigger_for(const Crash& c) const {
    return cfg_.fd_mode == FdMode::Nfd ? Observation::crashed(c.agent) : Observation::crashed_anon();
  }

  Crash assumption(AgentId a, Vertex v, int when) const {
    return Crash{cfg_.fd_mode == FdMode::Nfd ? a : kAnonymous, v, when};
  }

  PathContext context_for(const Event& ev) const {
    return merge_contexts(paths_[ev.effect.agent][ev.effect.path].context, PathContext{ev.crash});
  }

  bool has_rule(AgentId b, const TransitionRule& r) const {
    for (const auto& x : rules_[b])
      if (x.from_path == r.from_path && x.at_index == r.at_index && x.watch_vertex == r.watch_vertex &&
          x.trigger == r.trigger)
        return true;
    return false;
  }

  /// Can agent a be executing `rec` while agent b executes a path with `ctx`?
  bool coexists(AgentId a, const PathRecord& rec, AgentId b, const PathContext& ctx) const {
    if (names_agent(ctx, a) || names_agent(rec.context, b)) return false;
    return prune_inconsistent(rec.context, ctx, ins_.f);
  }

  /// Crashes of agent a on its path pa that block agent b on path qb.
  void events_between(AgentId a, int pa, AgentId b, int qb, std::vector<Event>& out) const {
    const auto& P = paths_[a][pa];
    const auto& Q = paths_[b][qb];
    if (names_agent(P.context, b) || names_agent(Q.context, a)) return;
    if (!prune_inconsistent(P.context, Q.context, ins_.f)) return;
    const bool syn = cfg_.model == Model::Syn;
    const int lp = static_cast<int>(P.timed.path.size());
    const int lq = static_cast<int>(Q.timed.path.size());
    std::map<std::pair<Vertex, int>, std::size_t> seen;  // (vertex, q) -> slot in out
    for (int kp = pa == 0 ? 1 : 2; kp <= lp; ++kp) {
      const Vertex v = P.timed.path[kp - 1];
      const int tp = syn ? P.timed.time_of(kp) : kUnconditional;
      Crash crash = assumption(a, v, tp);
      PathContext joint = merge_contexts(merge_contexts(P.context, Q.context), PathContext{crash});
      if (!prune_inconsistent(joint, {}, ins_.f)) continue;
      for (int q = 2; q <= lq; ++q) {
        if (Q.timed.path[q - 1] != v) continue;
        if (syn && Q.timed.time_of(q) <= tp) continue;
        if (Q.timed.path[q - 2] == v) break;  // not observable one step ahead
        auto key = std::pair(v, q);
        if (seen.count(key)) break;
        seen.emplace(key, out.size());
        out.push_back(Event{crash, Effect{b, qb, v, q, syn ? Q.timed.time_of(q) : q}});
        break;
      }
    }
  }

  void push(const Event& e) {
    auto gen_key = std::make_tuple(e.crash.agent, e.crash.vertex, e.effect.agent, e.effect.path, e.effect.at_index);
    if (!generated_.insert(gen_key).second) return;
    auto [t, b, a] = order_key(e);
    queue_.emplace(QueueKey{t, b, a, counter_++}, e);
  }

  SolveResult& fail(SolveResult& res, Failure::Reason r, std::string detail) {
    res.failure = Failure{r, std::move(detail)};
    finish(res);
    return res;
  }

  void finish(SolveResult& res) const {
    res.log = log_;
    res.contexts.clear();
    res.offsets.clear();
    for (const auto& recs : paths_) {
      res.contexts.emplace_back();
      res.offsets.emplace_back();
      for (const auto& r : recs) {
        res.contexts.back().push_back(r.context);
        res.offsets.back().push_back(r.timed.offset);
      }
    }
  }

  const Instance& ins_;
  SolverConfig cfg_;
  Deadline deadline_;
  std::vector<std::vector<PathRecord>> paths_;
  std::vector<std::vector<TransitionRule>> rules_;
  std::map<QueueKey, Event> queue_;
  std::set<std::tuple<AgentId, Vertex, AgentId, int, int>> generated_;
  std::vector<EventLogEntry> log_;
  long counter_ = 0;
};

inline SolveResult solve(const Instance& ins, const SolverConfig& cfg) { return DcrfSolver(ins, cfg).solve(); }

}  // namespace mappcf
