#pragma once

// File formats: MovingAI .map/.scen, JSON instance and solution documents,
// crash/schedule witnesses, and the results CSV.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mappcf/core.hpp"
#include "mappcf/exec.hpp"

namespace mappcf {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

// ---------------------------------------------------------------------------
// MovingAI maps and scenarios

struct GridMap {
  int width = 0, height = 0;
  Graph graph;
  std::vector<Vertex> vertex_at;                 // row-major cell -> vertex, -1 for obstacles
  std::vector<std::pair<int, int>> coordinates;  // vertex -> (x, y)

  Vertex at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return -1;
    return vertex_at[y * width + x];
  }
};

inline GridMap parse_map(const std::string& text) {
  std::istringstream in(text);
  std::string line, key, value;
  GridMap m;
  auto header = [&](const std::string& expect) {
    if (!std::getline(in, line)) throw FormatError("map: missing '" + expect + "' line");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    ls >> key;
    if (key != expect) throw FormatError("map: expected '" + expect + "', got '" + line + "'");
    ls >> value;
    return value;
  };
  header("type");
  try {
    m.height = std::stoi(header("height"));
    m.width = std::stoi(header("width"));
  } catch (const std::logic_error&) {
    throw FormatError("map: malformed dimensions");
  }
  if (m.height <= 0 || m.width <= 0) throw FormatError("map: non-positive dimensions");
  header("map");
  m.vertex_at.assign(static_cast<std::size_t>(m.width) * m.height, -1);
  int n = 0;
  for (int y = 0; y < m.height; ++y) {
    if (!std::getline(in, line)) throw FormatError("map: expected " + std::to_string(m.height) + " rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != m.width)
      throw FormatError("map: row " + std::to_string(y) + " has width " + std::to_string(line.size()));
    for (int x = 0; x < m.width; ++x) {
      char c = line[x];
      if (c == '.' || c == 'G') {
        m.vertex_at[y * m.width + x] = n++;
        m.coordinates.emplace_back(x, y);
      } else if (c != '@' && c != 'T' && c != 'O') {
        throw FormatError(std::string("map: unknown glyph '") + c + "' at row " + std::to_string(y));
      }
    }
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      Vertex u = m.at(x, y);
      if (u < 0) continue;
      if (Vertex r = m.at(x + 1, y); r >= 0) edges.emplace_back(u, r);
      if (Vertex d = m.at(x, y + 1); d >= 0) edges.emplace_back(u, d);
    }
  m.graph = Graph(n, edges);
  return m;
}

/// Starts and goals of the first n scenario rows.
inline std::pair<std::vector<Vertex>, std::vector<Vertex>> parse_scen(const std::string& text, const GridMap& m,
                                                                      int n) {
  std::istringstream in(text);
  std::string line;
  std::vector<Vertex> starts, goals;
  int row = 0;
  while (static_cast<int>(starts.size()) < n && std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("version", 0) == 0) continue;
    std::vector<std::string> cols;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, '\t');) cols.push_back(c);
    if (cols.size() < 8) throw FormatError("scen: line " + std::to_string(row) + " has too few columns");
    int sx, sy, gx, gy;
    try {
      sx = std::stoi(cols[4]);
      sy = std::stoi(cols[5]);
      gx = std::stoi(cols[6]);
      gy = std::stoi(cols[7]);
    } catch (const std::logic_error&) {
      throw FormatError("scen: line " + std::to_string(row) + " has non-numeric coordinates");
    }
    Vertex s = m.at(sx, sy), g = m.at(gx, gy);
    if (s < 0 || g < 0) throw FormatError("scen: line " + std::to_string(row) + " references an obstacle");
    starts.push_back(s);
    goals.push_back(g);
  }
  if (static_cast<int>(starts.size()) < n)
    throw FormatError("scen: only " + std::to_string(starts.size()) + " rows, " + std::to_string(n) + " requested");
  return {starts, goals};
}

// ---------------------------------------------------------------------------
// JSON documents

namespace detail {

template <class T>
T field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(where + "/" + key + ": " + e.what());
  }
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("json: ") + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// An instance document either embeds its graph as an edge list or
/// references a MovingAI map, in which case starts/goals are [x, y] cells.
struct InstanceDoc {
  Instance instance;
  std::string map;  // empty when the graph is embedded
  std::vector<std::pair<int, int>> start_cells, goal_cells;
};

inline std::string write_instance(const InstanceDoc& doc) {
  Json j;
  j["kind"] = "mappcf-instance";
  if (doc.map.empty()) {
    Json edges = Json::array();
    for (auto [u, v] : doc.instance.graph.edges()) edges.push_back({u, v});
    j["graph"] = {{"directed", doc.instance.graph.directed()},
                  {"num_vertices", doc.instance.graph.num_vertices()},
                  {"edges", edges}};
    j["starts"] = doc.instance.starts;
    j["goals"] = doc.instance.goals;
  } else {
    j["map"] = doc.map;
    Json s = Json::array(), g = Json::array();
    for (auto [x, y] : doc.start_cells) s.push_back({x, y});
    for (auto [x, y] : doc.goal_cells) g.push_back({x, y});
    j["starts"] = s;
    j["goals"] = g;
  }
  j["f"] = doc.instance.f;
  return detail::dump(j);
}

inline std::string write_instance(const Instance& ins) { return write_instance(InstanceDoc{ins, {}, {}, {}}); }

/// `base_dir` resolves relative map references.
inline InstanceDoc read_instance_doc(const std::string& text, const std::filesystem::path& base_dir = {}) {
  Json j = detail::parse_json(text);
  if (!j.is_object() || detail::field<std::string>(j, "kind", "instance") != "mappcf-instance")
    throw FormatError("instance: kind must be 'mappcf-instance'");
  InstanceDoc doc;
  Instance& ins = doc.instance;
  ins.f = detail::field<int>(j, "f", "instance");
  if (j.contains("map")) {
    doc.map = detail::field<std::string>(j, "map", "instance");
    GridMap m = parse_map(read_file(base_dir / doc.map));
    ins.graph = m.graph;
    for (const char* key : {"starts", "goals"}) {
      auto cells = detail::field<std::vector<std::pair<int, int>>>(j, key, "instance");
      for (auto [x, y] : cells) {
        Vertex v = m.at(x, y);
        if (v < 0) throw FormatError(std::string("instance/") + key + ": cell is not passable");
        (std::string(key) == "starts" ? ins.starts : ins.goals).push_back(v);
      }
      (std::string(key) == "starts" ? doc.start_cells : doc.goal_cells) = cells;
    }
  } else {
    const Json& g = j.contains("graph") ? j.at("graph") : Json();
    const int n = detail::field<int>(g, "num_vertices", "instance/graph");
    const bool directed = detail::field<bool>(g, "directed", "instance/graph");
    auto edges = detail::field<std::vector<std::pair<Vertex, Vertex>>>(g, "edges", "instance/graph");
    try {
      ins.graph = Graph(n, edges, directed);
    } catch (const std::out_of_range& e) {
      throw FormatError(std::string("instance/graph/edges: ") + e.what());
    }
    ins.starts = detail::field<std::vector<Vertex>>(j, "starts", "instance");
    ins.goals = detail::field<std::vector<Vertex>>(j, "goals", "instance");
  }
  return doc;
}

inline Instance read_instance(const std::string& text, const std::filesystem::path& base_dir = {}) {
  return read_instance_doc(text, base_dir).instance;
}

namespace detail {

inline Json observation_json(const Observation& o) {
  switch (o.kind) {
    case Observation::Kind::Vacant: return "vacant";
    case Observation::Kind::Correct: return "correct";
    case Observation::Kind::CrashedAnon: return "crashed";
    case Observation::Kind::Crashed: return Json{{"crashed", o.agent}};
  }
  return nullptr;
}

inline Observation observation_from(const Json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "vacant") return Observation::vacant();
    if (s == "correct") return Observation::correct();
    if (s == "crashed") return Observation::crashed_anon();
  } else if (j.is_object() && j.size() == 1 && j.contains("crashed")) {
    return Observation::crashed(field<int>(j, "crashed", where));
  }
  throw FormatError(where + ": unknown trigger " + j.dump());
}

}  // namespace detail

inline std::string write_solution(const Solution& sol) {
  Json j;
  j["kind"] = "mappcf-solution";
  j["model"] = to_string(sol.model);
  j["fd"] = to_string(sol.fd_mode);
  Json plans = Json::array();
  for (const auto& p : sol.plans) {
    Json jp;
    jp["paths"] = p.paths;
    Json rules = Json::array();
    for (const auto& r : p.rules)
      rules.push_back({{"from", r.from_path},
                       {"at", r.at_index},
                       {"watch", r.watch_vertex},
                       {"trigger", detail::observation_json(r.trigger)},
                       {"to", r.to_path}});
    jp["rules"] = rules;
    plans.push_back(jp);
  }
  j["plans"] = plans;
  return detail::dump(j);
}

inline Model parse_model(const std::string& s) {
  if (s == "syn") return Model::Syn;
  if (s == "seq") return Model::Seq;
  throw FormatError("unknown model '" + s + "'");
}

inline FdMode parse_fd(const std::string& s) {
  if (s == "nfd") return FdMode::Nfd;
  if (s == "afd") return FdMode::Afd;
  throw FormatError("unknown failure detector '" + s + "'");
}

inline Solution read_solution(const std::string& text) {
  Json j = detail::parse_json(text);
  if (!j.is_object() || detail::field<std::string>(j, "kind", "solution") != "mappcf-solution")
    throw FormatError("solution: kind must be 'mappcf-solution'");
  Solution sol;
  sol.model = parse_model(detail::field<std::string>(j, "model", "solution"));
  sol.fd_mode = parse_fd(detail::field<std::string>(j, "fd", "solution"));
  const auto plans = detail::field<Json>(j, "plans", "solution");
  if (!plans.is_array()) throw FormatError("solution/plans: not an array");
  for (std::size_t a = 0; a < plans.size(); ++a) {
    const std::string where = "solution/plans/" + std::to_string(a);
    Plan p;
    p.paths = detail::field<std::vector<Path>>(plans[a], "paths", where);
    if (p.paths.empty()) throw FormatError(where + "/paths: empty");
    for (std::size_t k = 0; k < p.paths.size(); ++k)
      if (p.paths[k].empty()) throw FormatError(where + "/paths/" + std::to_string(k) + ": empty path");
    const auto rules = detail::field<Json>(plans[a], "rules", where);
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const std::string rw = where + "/rules/" + std::to_string(r);
      TransitionRule tr;
      tr.from_path = detail::field<int>(rules[r], "from", rw);
      tr.at_index = detail::field<int>(rules[r], "at", rw);
      tr.watch_vertex = detail::field<Vertex>(rules[r], "watch", rw);
      tr.trigger = detail::observation_from(detail::field<Json>(rules[r], "trigger", rw), rw + "/trigger");
      tr.to_path = detail::field<int>(rules[r], "to", rw);
      const int np = static_cast<int>(p.paths.size());
      if (tr.from_path < 0 || tr.from_path >= np || tr.to_path < 0 || tr.to_path >= np)
        throw FormatError(rw + ": path index out of range");
      if (tr.at_index < 1 || tr.at_index > static_cast<int>(p.paths[tr.from_path].size()))
        throw FormatError(rw + "/at: progress index out of range");
      p.rules.push_back(tr);
    }
    sol.plans.push_back(std::move(p));
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Witnesses

inline std::string format_crash_pattern(const SynCrashPattern& p) {
  std::string out;
  for (AgentId a = 0; a < static_cast<AgentId>(p.crash_time.size()); ++a)
    if (p.crash_time[a]) out += (out.empty() ? "" : " ") + std::to_string(a) + "@" + std::to_string(*p.crash_time[a]);
  return out;
}

/// Parses "agent@t" tokens.
inline SynCrashPattern parse_crashes(const std::vector<std::string>& tokens, int num_agents) {
  SynCrashPattern p;
  p.crash_time.assign(num_agents, std::nullopt);
  for (const auto& t : tokens) {
    auto at = t.find('@');
    if (at == std::string::npos) throw FormatError("crash '" + t + "': expected agent@time");
    int a, time;
    try {
      a = std::stoi(t.substr(0, at));
      time = std::stoi(t.substr(at + 1));
    } catch (const std::logic_error&) {
      throw FormatError("crash '" + t + "': expected agent@time");
    }
    if (a < 0 || a >= num_agents || time < 1) throw FormatError("crash '" + t + "': out of range");
    if (p.crash_time[a]) throw FormatError("crash '" + t + "': agent crashes twice");
    p.crash_time[a] = time;
  }
  return p;
}

/// One action per line: "activate <agent>" or "crash <agent>". Lines starting
/// with '#' or "t=" are ignored, so a witness file doubles as a schedule.
inline SeqSchedule parse_schedule(const std::string& text, int num_agents) {
  SeqSchedule s;
  std::istringstream in(text);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::istringstream ls(line);
    std::string verb;
    if (!(ls >> verb) || verb[0] == '#' || verb.rfind("t=", 0) == 0) continue;
    int a;
    if (!(ls >> a) || a < 0 || a >= num_agents)
      throw FormatError("schedule line " + std::to_string(row) + ": bad agent");
    if (verb == "activate") s.push_back(SeqAction::activate(a));
    else if (verb == "crash") s.push_back(SeqAction::crash(a));
    else throw FormatError("schedule line " + std::to_string(row) + ": unknown action '" + verb + "'");
  }
  return s;
}

inline std::string format_schedule(const SeqSchedule& s) {
  std::string out;
  for (const auto& a : s)
    out += (a.kind == SeqAction::Kind::Activate ? "activate " : "crash ") + std::to_string(a.agent) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Results table

struct ResultRow {
  std::string instance_id, map, model, fd, algo;
  int n_agents = 0, f = 0;
  std::string outcome;         // "solved" or "failed"
  std::string failure_reason;  // empty when solved
  double runtime_ms = 0;
  std::optional<double> cost_normalized;
};

/// Sum over agents of (primary length - 1), divided by the sum of shortest
/// start-goal distances.
inline double cost_normalized(const Instance& ins, const Solution& sol) {
  long num = 0, den = 0;
  for (AgentId a = 0; a < ins.num_agents(); ++a) {
    num += static_cast<long>(sol.plans[a].paths[0].size()) - 1;
    den += bfs_distances(ins.graph, ins.starts[a])[ins.goals[a]];
  }
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{"instance_id", "map",     "model",          "fd",
                                             "algo",        "n_agents", "f",             "outcome",
                                             "failure_reason", "runtime_ms", "cost_normalized"};
  return cols;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

inline std::string write_results(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  const auto& cols = result_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  for (const auto& r : rows) {
    using detail::csv_field;
    os << csv_field(r.instance_id) << ',' << csv_field(r.map) << ',' << r.model << ',' << r.fd << ',' << r.algo
       << ',' << r.n_agents << ',' << r.f << ',' << r.outcome << ',' << r.failure_reason << ',' << std::fixed
       << std::setprecision(3) << r.runtime_ms << ',';
    if (r.cost_normalized) os << std::setprecision(6) << *r.cost_normalized;
    os << '\n';
  }
  return os.str();
}

}  // namespace mappcf
