#pragma once

// Deterministic execution of a Solution: the failure-detector oracle, one
// synchronous step, one sequential action, and whole-run drivers.

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mappcf/core.hpp"

namespace mappcf {

enum class Status { Correct, Crashed, Done };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Correct: return "correct";
    case Status::Crashed: return "crashed";
    case Status::Done: return "done";
  }
  return "?";
}

struct AgentState {
  int path = 0;
  int progress = 1;  // 1-based index into the executing path
  Vertex vertex = 0;
  Status status = Status::Correct;

  auto operator<=>(const AgentState&) const = default;
};

struct Config {
  std::vector<AgentState> agents;
  int time = 1;  // SYN timestep, or number of applied SEQ actions + 1
};

struct FiredRule {
  AgentId agent;
  int rule_index;
};

struct Collision {
  AgentId a = -1, b = -1;
  int time = 0;  // timestep at which the colliding configuration would occur
  Vertex vertex = -1;
  bool swap = false;
};

struct StepResult {
  Config next;
  std::vector<FiredRule> fired;
  std::optional<Collision> collision;
};

struct SeqAction {
  enum class Kind { Activate, Crash };
  Kind kind = Kind::Activate;
  AgentId agent = 0;

  static SeqAction activate(AgentId a) { return {Kind::Activate, a}; }
  static SeqAction crash(AgentId a) { return {Kind::Crash, a}; }
  bool operator==(const SeqAction&) const = default;
};

using SeqSchedule = std::vector<SeqAction>;

/// Per-agent optional crash timestep; the crash happens in the crash phase of
/// that step, i.e. the agent stays forever at its vertex of that time.
struct SynCrashPattern {
  std::vector<std::optional<int>> crash_time;

  int num_crashes() const {
    int c = 0;
    for (const auto& t : crash_time) c += t.has_value();
    return c;
  }
  bool operator==(const SynCrashPattern&) const = default;
};

inline std::string to_string(const SeqAction& a) {
  return std::string(a.kind == SeqAction::Kind::Activate ? "activate(" : "crash(") +
         std::to_string(a.agent) + ")";
}

// ---------------------------------------------------------------------------

inline bool reached_goal(const Instance& ins, const Solution& sol, AgentId a, const AgentState& s) {
  const Path& p = sol.plans[a].paths[s.path];
  return s.progress == static_cast<int>(p.size()) && s.vertex == ins.goals[a];
}

inline Config initial_config(const Instance& ins, const Solution& sol) {
  Config c;
  for (AgentId a = 0; a < ins.num_agents(); ++a) {
    AgentState s;
    s.vertex = sol.plans[a].paths[0].front();
    if (reached_goal(ins, sol, a, s)) s.status = Status::Done;
    c.agents.push_back(s);
  }
  return c;
}

/// Detector reading for a single vertex.
inline Observation observe_vertex(const Config& c, Vertex v, FdMode fd) {
  for (AgentId b = 0; b < static_cast<AgentId>(c.agents.size()); ++b) {
    const auto& s = c.agents[b];
    if (s.vertex != v) continue;
    if (s.status != Status::Crashed) return Observation::correct();
    return fd == FdMode::Nfd ? Observation::crashed(b) : Observation::crashed_anon();
  }
  return Observation::vacant();
}

/// Detector readings for every neighbor of the agent's vertex.
inline std::vector<std::pair<Vertex, Observation>> observe(const Graph& g, const Config& c, AgentId a,
                                                           FdMode fd) {
  std::vector<std::pair<Vertex, Observation>> out;
  for (Vertex v : g.neighbors(c.agents[a].vertex)) out.emplace_back(v, observe_vertex(c, v, fd));
  return out;
}

namespace detail {

/// First rule matching the agent's (path, progress) and current readings.
inline std::optional<int> matching_rule(const Instance& ins, const Solution& sol, const Config& c,
                                        const AgentState& s, AgentId a) {
  const auto& rules = sol.plans[a].rules;
  for (int r = 0; r < static_cast<int>(rules.size()); ++r) {
    const auto& rule = rules[r];
    if (rule.from_path != s.path || rule.at_index != s.progress) continue;
    if (!ins.graph.has_edge(s.vertex, rule.watch_vertex)) continue;
    if (observe_vertex(c, rule.watch_vertex, sol.fd_mode) == rule.trigger) return r;
  }
  return std::nullopt;
}

inline void apply_rule(const Solution& sol, AgentState& s, AgentId a, int r) {
  s.path = sol.plans[a].rules[r].to_path;
  s.progress = 1;
}

/// Path-change phase. A switch lands on index 1 of the target path, whose own
/// rules are checked against the same readings, so switches may chain.
inline void switch_paths(const Instance& ins, const Solution& sol, const Config& observed, AgentState& s,
                         AgentId a, std::vector<FiredRule>& fired) {
  for (std::size_t guard = 0; guard <= sol.plans[a].rules.size(); ++guard) {
    auto r = matching_rule(ins, sol, observed, s, a);
    if (!r) return;
    apply_rule(sol, s, a, *r);
    fired.push_back({a, *r});
  }
}

}  // namespace detail

/// One synchronous step: crash, switch paths, move, increment.
inline StepResult step_syn(const Instance& ins, const Solution& sol, const Config& c,
                           const std::vector<AgentId>& crashes_now) {
  StepResult res;
  Config& n = res.next;
  n = c;
  for (AgentId a : crashes_now) n.agents[a].status = Status::Crashed;

  // every agent observes the post-crash configuration
  const Config observed = n;
  const int num = static_cast<int>(n.agents.size());
  for (AgentId a = 0; a < num; ++a) {
    if (n.agents[a].status != Status::Correct) continue;
    detail::switch_paths(ins, sol, observed, n.agents[a], a, res.fired);
  }

  std::vector<Vertex> from(num);
  for (AgentId a = 0; a < num; ++a) {
    auto& s = n.agents[a];
    from[a] = s.vertex;
    if (s.status != Status::Correct) continue;
    const Path& p = sol.plans[a].paths[s.path];
    if (s.progress < static_cast<int>(p.size())) {
      s.vertex = p[s.progress];
      ++s.progress;
    }
  }
  n.time = c.time + 1;

  for (AgentId a = 0; a < num && !res.collision; ++a)
    for (AgentId b = a + 1; b < num; ++b) {
      const auto& sa = n.agents[a];
      const auto& sb = n.agents[b];
      if (sa.vertex == sb.vertex) {
        res.collision = Collision{a, b, n.time, sa.vertex, false};
        break;
      }
      if (sa.vertex != from[a] && sa.vertex == from[b] && sb.vertex == from[a]) {
        res.collision = Collision{a, b, n.time, sa.vertex, true};
        break;
      }
    }

  for (AgentId a = 0; a < num; ++a)
    if (n.agents[a].status == Status::Correct && reached_goal(ins, sol, a, n.agents[a]))
      n.agents[a].status = Status::Done;
  return res;
}

/// One sequential action. Blocked moves and actions on finished agents are
/// no-ops.
inline StepResult step_seq(const Instance& ins, const Solution& sol, const Config& c, SeqAction act) {
  StepResult res;
  Config& n = res.next;
  n = c;
  n.time = c.time + 1;
  auto& s = n.agents[act.agent];
  if (act.kind == SeqAction::Kind::Crash) {
    s.status = Status::Crashed;
    return res;
  }
  if (s.status != Status::Correct) return res;
  detail::switch_paths(ins, sol, c, s, act.agent, res.fired);
  const Path& p = sol.plans[act.agent].paths[s.path];
  if (s.progress < static_cast<int>(p.size())) {
    Vertex next = p[s.progress];
    bool occupied = false;
    if (next != s.vertex)
      for (AgentId b = 0; b < static_cast<AgentId>(n.agents.size()); ++b)
        if (b != act.agent && n.agents[b].vertex == next) occupied = true;
    if (!occupied) {
      s.vertex = next;
      ++s.progress;
    }
  }
  if (reached_goal(ins, sol, act.agent, s)) s.status = Status::Done;
  return res;
}

// ---------------------------------------------------------------------------
// Runs and traces

struct TraceEntry {
  std::string label;  // "init", "step", or a SEQ action
  Config config;
  std::vector<FiredRule> fired;
};

struct Trace {
  std::vector<TraceEntry> entries;
};

struct Outcome {
  enum class Kind { AllArrived, Stuck, Collision };
  Kind kind = Kind::AllArrived;
  std::vector<AgentId> stuck;
  std::optional<Collision> collision;

  bool ok() const { return kind == Kind::AllArrived; }
};

inline std::string to_string(const Outcome& o) {
  std::ostringstream os;
  switch (o.kind) {
    case Outcome::Kind::AllArrived: os << "all_arrived"; break;
    case Outcome::Kind::Stuck:
      os << "stuck(";
      for (std::size_t k = 0; k < o.stuck.size(); ++k) os << (k ? "," : "") << o.stuck[k];
      os << ")";
      break;
    case Outcome::Kind::Collision:
      os << (o.collision->swap ? "swap_collision(" : "vertex_collision(") << o.collision->a << ","
         << o.collision->b << ",t=" << o.collision->time << ",v=" << o.collision->vertex << ")";
      break;
  }
  return os.str();
}

struct RunResult {
  Trace trace;
  Outcome outcome;
};

inline std::vector<AgentId> unfinished_agents(const Config& c) {
  std::vector<AgentId> out;
  for (AgentId a = 0; a < static_cast<AgentId>(c.agents.size()); ++a)
    if (c.agents[a].status == Status::Correct) out.push_back(a);
  return out;
}

/// Synchronous run under a crash pattern. Ends when every agent is done or
/// crashed, on a collision, or when a configuration repeats after the last
/// scheduled crash (no further progress is possible).
inline RunResult run_syn(const Instance& ins, const Solution& sol, const SynCrashPattern& pattern) {
  RunResult rr;
  Config c = initial_config(ins, sol);
  rr.trace.entries.push_back({"init", c, {}});
  int last_crash = 0;
  for (const auto& t : pattern.crash_time)
    if (t) last_crash = std::max(last_crash, *t);
  std::set<std::vector<AgentState>> seen;

  while (true) {
    if (unfinished_agents(c).empty()) {
      rr.outcome.kind = Outcome::Kind::AllArrived;
      return rr;
    }
    if (c.time > last_crash && !seen.insert(c.agents).second) {
      rr.outcome.kind = Outcome::Kind::Stuck;
      rr.outcome.stuck = unfinished_agents(c);
      return rr;
    }
    std::vector<AgentId> crashes;
    for (AgentId a = 0; a < static_cast<AgentId>(c.agents.size()); ++a)
      if (a < static_cast<AgentId>(pattern.crash_time.size()) && pattern.crash_time[a] == c.time &&
          c.agents[a].status != Status::Crashed)
        crashes.push_back(a);
    std::string label = "step";
    if (!crashes.empty()) {
      label += " crash{";
      for (std::size_t k = 0; k < crashes.size(); ++k) label += (k ? "," : "") + std::to_string(crashes[k]);
      label += "}";
    }
    auto st = step_syn(ins, sol, c, crashes);
    rr.trace.entries.push_back({label, st.next, st.fired});
    if (st.collision) {
      rr.outcome.kind = Outcome::Kind::Collision;
      rr.outcome.collision = st.collision;
      return rr;
    }
    c = std::move(st.next);
  }
}

/// Sequential run: consumes the schedule, then reports agents left unfinished.
inline RunResult run_seq(const Instance& ins, const Solution& sol, const SeqSchedule& schedule) {
  RunResult rr;
  Config c = initial_config(ins, sol);
  rr.trace.entries.push_back({"init", c, {}});
  for (const auto& act : schedule) {
    auto st = step_seq(ins, sol, c, act);
    rr.trace.entries.push_back({to_string(act), st.next, st.fired});
    c = std::move(st.next);
  }
  auto left = unfinished_agents(c);
  rr.outcome.kind = left.empty() ? Outcome::Kind::AllArrived : Outcome::Kind::Stuck;
  rr.outcome.stuck = std::move(left);
  return rr;
}

/// One line per configuration:
///   t=<time> <label> | <agent>:v<vertex>/p<path>/i<index>/<status> ... [| fired <agent>:r<rule> ...]
inline std::string format_trace(const Trace& tr) {
  std::ostringstream os;
  for (const auto& e : tr.entries) {
    os << "t=" << e.config.time << ' ' << e.label << " |";
    for (std::size_t a = 0; a < e.config.agents.size(); ++a) {
      const auto& s = e.config.agents[a];
      os << ' ' << a << ":v" << s.vertex << "/p" << s.path << "/i" << s.progress << '/' << to_string(s.status);
    }
    if (!e.fired.empty()) {
      os << " | fired";
      for (const auto& f : e.fired) os << ' ' << f.agent << ":r" << f.rule_index;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace mappcf
