#pragma once

// Batch running shared by the command-line tool and the test suites: one
// solver run as a results row, and a multi-threaded benchmark sweep.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mappcf/dcrf.hpp"
#include "mappcf/disjoint.hpp"
#include "mappcf/gen.hpp"
#include "mappcf/io.hpp"

namespace mappcf {

enum class Algo { Dcrf, Disjoint };

inline const char* to_string(Algo a) { return a == Algo::Dcrf ? "dcrf" : "disjoint"; }

inline Algo parse_algo(const std::string& s) {
  if (s == "dcrf") return Algo::Dcrf;
  if (s == "disjoint") return Algo::Disjoint;
  throw FormatError("unknown algorithm '" + s + "'");
}

struct RunOutcome {
  std::optional<Solution> solution;
  std::string failure_reason;  // empty on success
  double runtime_ms = 0;
};

inline RunOutcome run_solver(const Instance& ins, Algo algo, const SolverConfig& cfg) {
  RunOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  if (algo == Algo::Dcrf) {
    auto r = solve(ins, cfg);
    if (r.ok()) out.solution = std::move(r.solution);
    else out.failure_reason = to_string(r.failure->reason);
  } else {
    Deadline dl = cfg.timeout_s > 0 ? Deadline(std::chrono::duration<double>(cfg.timeout_s)) : Deadline::never();
    auto r = solve_disjoint(ins, dl);
    if (r.solved()) out.solution = solution_from_paths(r.paths, cfg.model, cfg.fd_mode);
    else out.failure_reason = r.kind == DisjointResult::Kind::Timeout ? "timeout" : "infeasible";
  }
  out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

struct BenchJob {
  std::string instance_id, map;
  Instance instance;
  Model model;
  FdMode fd;
  Algo algo;
  double timeout_s;
  std::uint64_t seed;
};

inline ResultRow run_job(const BenchJob& job) {
  SolverConfig cfg;
  cfg.model = job.model;
  cfg.fd_mode = job.fd;
  cfg.timeout_s = job.timeout_s;
  cfg.seed = job.seed;
  auto out = run_solver(job.instance, job.algo, cfg);
  ResultRow row;
  row.instance_id = job.instance_id;
  row.map = job.map;
  row.model = to_string(job.model);
  row.fd = to_string(job.fd);
  row.algo = to_string(job.algo);
  row.n_agents = job.instance.num_agents();
  row.f = job.instance.f;
  row.outcome = out.solution ? "solved" : "failed";
  row.failure_reason = out.failure_reason;
  row.runtime_ms = out.runtime_ms;
  if (out.solution) row.cost_normalized = cost_normalized(job.instance, *out.solution);
  return row;
}

/// Runs every job on `jobs` worker threads. Rows come back in job order.
inline std::vector<ResultRow> run_jobs(const std::vector<BenchJob>& jobs, int workers) {
  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) rows[k] = run_job(jobs[k]);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::max(workers, 1); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

/// Benchmark sweep description (JSON):
///   {"map": "file.map"} or {"grid": {"width", "height", "obstacles", "seed"}},
///   optional "scen": "file.scen" (instances = first n rows),
///   "n": [..], "f": [..], "models": [..], "fd": [..], "algos": [..],
///   "instances_per_point": K, "seed": S, "timeout": seconds
struct BenchConfig {
  std::string map, scen;
  int grid_width = 16, grid_height = 16;
  double grid_obstacles = 0.1;
  std::uint64_t grid_seed = 0;
  std::vector<int> n{2}, f{1};
  std::vector<Model> models{Model::Syn};
  std::vector<FdMode> fds{FdMode::Nfd};
  std::vector<Algo> algos{Algo::Dcrf, Algo::Disjoint};
  int instances_per_point = 25;
  std::uint64_t seed = 0;
  double timeout_s = 30;
};

inline BenchConfig parse_bench_config(const std::string& text) {
  Json j = detail::parse_json(text);
  BenchConfig c;
  if (j.contains("map")) c.map = detail::field<std::string>(j, "map", "bench");
  if (j.contains("scen")) c.scen = detail::field<std::string>(j, "scen", "bench");
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    c.grid_width = detail::field<int>(g, "width", "bench/grid");
    c.grid_height = detail::field<int>(g, "height", "bench/grid");
    c.grid_obstacles = detail::field<double>(g, "obstacles", "bench/grid");
    if (g.contains("seed")) c.grid_seed = detail::field<std::uint64_t>(g, "seed", "bench/grid");
  }
  if (j.contains("n")) c.n = detail::field<std::vector<int>>(j, "n", "bench");
  if (j.contains("f")) c.f = detail::field<std::vector<int>>(j, "f", "bench");
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& s : detail::field<std::vector<std::string>>(j, "models", "bench")) c.models.push_back(parse_model(s));
  }
  if (j.contains("fd")) {
    c.fds.clear();
    for (const auto& s : detail::field<std::vector<std::string>>(j, "fd", "bench")) c.fds.push_back(parse_fd(s));
  }
  if (j.contains("algos")) {
    c.algos.clear();
    for (const auto& s : detail::field<std::vector<std::string>>(j, "algos", "bench")) c.algos.push_back(parse_algo(s));
  }
  if (j.contains("instances_per_point"))
    c.instances_per_point = detail::field<int>(j, "instances_per_point", "bench");
  if (j.contains("seed")) c.seed = detail::field<std::uint64_t>(j, "seed", "bench");
  if (j.contains("timeout")) c.timeout_s = detail::field<double>(j, "timeout", "bench");
  return c;
}

/// Expands a sweep into jobs. Map and scenario paths resolve against base_dir.
inline std::vector<BenchJob> expand_bench(const BenchConfig& c, const std::filesystem::path& base_dir = {}) {
  Graph graph;
  std::string map_name;
  std::optional<GridMap> grid;
  if (!c.map.empty()) {
    grid = parse_map(read_file(base_dir / c.map));
    graph = grid->graph;
    map_name = c.map;
  } else {
    graph = random_grid(c.grid_width, c.grid_height, c.grid_obstacles, c.grid_seed);
    map_name = "random-" + std::to_string(c.grid_width) + "-" + std::to_string(c.grid_height);
  }
  std::vector<BenchJob> jobs;
  for (int n : c.n)
    for (int f : c.f)
      for (int k = 0; k < (c.scen.empty() ? c.instances_per_point : 1); ++k) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
        Instance ins;
        std::string id = map_name + "/n" + std::to_string(n) + "/f" + std::to_string(f);
        if (!c.scen.empty()) {
          if (!grid) throw FormatError("bench: a scenario needs a map");
          auto [s, g] = parse_scen(read_file(base_dir / c.scen), *grid, n);
          ins = Instance{graph, s, g, f};
          id += "/scen";
        } else {
          ins = gen_well_formed(graph, n, f, seed * 1000003ull + static_cast<std::uint64_t>(n) * 101 + f);
          id += "/s" + std::to_string(seed);
        }
        for (Model m : c.models)
          for (FdMode fd : c.fds)
            for (Algo a : c.algos) jobs.push_back({id, map_name, ins, m, fd, a, c.timeout_s, seed});
      }
  return jobs;
}

}  // namespace mappcf
