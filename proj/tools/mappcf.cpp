// mappcf command-line tool.
//
// Exit codes: 0 success, 1 usage or input error, 2 solver failure,
// 3 counterexample found, 4 verifier state cap exceeded.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mappcf/mappcf.hpp"

namespace fs = std::filesystem;
using namespace mappcf;

namespace {

Instance load_instance(const std::string& path) {
  return read_instance(read_file(path), fs::path(path).parent_path());
}

std::vector<AgentId> load_priority(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<AgentId> order;
  for (AgentId a; in >> a;) order.push_back(a);
  return order;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

int cmd_solve(const std::string& instance_path, const std::string& model, const std::string& fd,
              const std::string& algo, int f, std::uint64_t seed, double timeout, const std::string& refine,
              const std::string& priority, const std::string& out) {
  Instance ins = load_instance(instance_path);
  if (f >= 0) ins.f = f;
  if (auto v = validate_instance(ins); !v.empty()) {
    std::cerr << "invalid instance: " << to_string(v.front().tag) << " " << v.front().detail << "\n";
    return 1;
  }
  SolverConfig cfg;
  cfg.model = parse_model(model);
  cfg.fd_mode = parse_fd(fd);
  cfg.seed = seed;
  cfg.timeout_s = timeout;
  cfg.refine = refine == "on";
  if (!priority.empty()) cfg.priority = load_priority(priority);
  auto r = run_solver(ins, parse_algo(algo), cfg);
  if (r.solution) emit(out, write_solution(*r.solution));
  std::cerr << "outcome=" << (r.solution ? "solved" : "failed") << " reason=" << r.failure_reason
            << " runtime_ms=" << r.runtime_ms << "\n";
  return r.solution ? 0 : 2;
}

int cmd_verify(const std::string& instance_path, const std::string& solution_path, int f, std::size_t max_states) {
  Instance ins = load_instance(instance_path);
  if (f >= 0) ins.f = f;
  Solution sol = read_solution(read_file(solution_path));
  if (static_cast<int>(sol.plans.size()) != ins.num_agents()) {
    std::cerr << "solution has " << sol.plans.size() << " plans for " << ins.num_agents() << " agents\n";
    return 1;
  }
  VerifyOptions opt;
  opt.max_states = max_states;
  auto res = verify(ins, sol, opt);
  std::cout << to_string(res.kind) << " states=" << res.states << "\n";
  if (res.kind == VerifyResult::Kind::TooLarge) return 4;
  if (res.verified()) return 0;

  std::ostringstream w;
  if (res.syn_witness) {
    w << "# witness syn crashes " << format_crash_pattern(*res.syn_witness) << "\n";
    w << "# outcome " << to_string(res.outcome) << "\n";
    w << format_trace(run_syn(ins, sol, *res.syn_witness).trace);
  } else {
    w << "# witness seq schedule\n# outcome " << to_string(res.outcome) << "\n";
    w << format_schedule(*res.seq_witness);
    std::istringstream trace(format_trace(run_seq(ins, sol, *res.seq_witness).trace));
    for (std::string line; std::getline(trace, line);) w << "# " << line << "\n";
  }
  const std::string witness_path = solution_path + ".witness.txt";
  write_file(witness_path, w.str());
  std::cout << "outcome " << to_string(res.outcome) << "\nwitness " << witness_path << "\n";
  return 3;
}

int cmd_simulate(const std::string& instance_path, const std::string& solution_path,
                 const std::vector<std::string>& crashes, const std::string& schedule) {
  Instance ins = load_instance(instance_path);
  Solution sol = read_solution(read_file(solution_path));
  RunResult rr;
  if (sol.model == Model::Syn) {
    if (!schedule.empty()) throw FormatError("--schedule applies to seq solutions");
    rr = run_syn(ins, sol, parse_crashes(crashes, ins.num_agents()));
  } else {
    if (!crashes.empty()) throw FormatError("--crash applies to syn solutions; use --schedule");
    rr = run_seq(ins, sol, schedule.empty() ? SeqSchedule{} : parse_schedule(read_file(schedule), ins.num_agents()));
  }
  std::cout << format_trace(rr.trace) << "outcome " << to_string(rr.outcome) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent path planning with crash faults"};
  app.require_subcommand(1);

  // solve
  std::string instance, model = "syn", fd = "nfd", algo = "dcrf", refine = "on", priority, out;
  int f = -1;
  std::uint64_t seed = 0;
  double timeout = 30;
  auto* solve_cmd = app.add_subcommand("solve", "Plan a solution for an instance");
  solve_cmd->add_option("--instance", instance, "Instance document")->required();
  solve_cmd->add_option("--model", model, "syn|seq")->check(CLI::IsMember({"syn", "seq"}));
  solve_cmd->add_option("--fd", fd, "nfd|afd")->check(CLI::IsMember({"nfd", "afd"}));
  solve_cmd->add_option("--algo", algo, "dcrf|disjoint")->check(CLI::IsMember({"dcrf", "disjoint"}));
  solve_cmd->add_option("--f", f, "Override the crash budget");
  solve_cmd->add_option("--seed", seed, "Seed for priority restarts");
  solve_cmd->add_option("--timeout", timeout, "Seconds");
  solve_cmd->add_option("--refine", refine, "on|off")->check(CLI::IsMember({"on", "off"}));
  solve_cmd->add_option("--priority", priority, "File listing the planning order of agents");
  solve_cmd->add_option("--out", out, "Solution document (default stdout)");

  // verify
  std::string solution;
  std::size_t max_states = 10'000'000;
  auto* verify_cmd = app.add_subcommand("verify", "Check a solution against every admissible crash");
  verify_cmd->add_option("--instance", instance)->required();
  verify_cmd->add_option("--solution", solution)->required();
  verify_cmd->add_option("--f", f, "Override the crash budget");
  verify_cmd->add_option("--max-states", max_states);

  // simulate
  std::vector<std::string> crashes;
  std::string schedule;
  auto* sim_cmd = app.add_subcommand("simulate", "Print the execution trace for given crashes");
  sim_cmd->add_option("--instance", instance)->required();
  sim_cmd->add_option("--solution", solution)->required();
  sim_cmd->add_option("--crash", crashes, "agent@t (syn)");
  sim_cmd->add_option("--schedule", schedule, "Action file (seq)");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate instance documents");
  gen_cmd->require_subcommand(1);
  std::string name, reference, reference_out;
  auto* fix_cmd = gen_cmd->add_subcommand("fixture", "Reference instance");
  fix_cmd->add_option("name", name)->required()->check(CLI::IsMember(fixture_names()));
  fix_cmd->add_option("--out", out);
  fix_cmd->add_option("--reference", reference, "Also write this reference solution");
  fix_cmd->add_option("--reference-out", reference_out);
  fix_cmd->add_option("--priority-out", priority, "Write the pinned planning order");

  std::string map, scen;
  int n = 2, width = 16, height = 16;
  double obstacles = 0.1;
  int gen_f = 1;
  auto* rnd_cmd = gen_cmd->add_subcommand("random", "Random well-formed instance");
  rnd_cmd->add_option("--map", map, "MovingAI map (default: random grid)");
  rnd_cmd->add_option("--scen", scen, "Take the first n scenario rows instead of sampling");
  rnd_cmd->add_option("--n", n);
  rnd_cmd->add_option("--f", gen_f);
  rnd_cmd->add_option("--seed", seed);
  rnd_cmd->add_option("--width", width);
  rnd_cmd->add_option("--height", height);
  rnd_cmd->add_option("--obstacles", obstacles);
  rnd_cmd->add_option("--out", out);

  std::string dimacs;
  auto* sat_cmd = gen_cmd->add_subcommand("sat", "Reduce a 3-CNF formula");
  sat_cmd->add_option("--dimacs", dimacs)->required();
  sat_cmd->add_option("--f", gen_f);
  sat_cmd->add_option("--out", out);

  // bench
  std::string config;
  int jobs = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark sweep");
  bench_cmd->add_option("--config", config)->required();
  bench_cmd->add_option("--jobs", jobs);
  bench_cmd->add_option("--out", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(instance, model, fd, algo, f, seed, timeout, refine, priority, out);
    if (*verify_cmd) return cmd_verify(instance, solution, f, max_states);
    if (*sim_cmd) return cmd_simulate(instance, solution, crashes, schedule);
    if (*fix_cmd) {
      Fixture fx = fixture(name);
      emit(out, write_instance(fx.instance));
      if (!reference.empty()) {
        auto it = fx.references.find(reference);
        if (it == fx.references.end()) {
          std::cerr << "fixture " << name << " has no reference '" << reference << "'\n";
          return 1;
        }
        emit(reference_out, write_solution(it->second));
      }
      if (!priority.empty()) {
        std::string text;
        for (AgentId a : fx.priority) text += std::to_string(a) + "\n";
        write_file(priority, text);
      }
      return 0;
    }
    if (*rnd_cmd) {
      InstanceDoc doc;
      if (!map.empty()) {
        GridMap m = parse_map(read_file(map));
        if (!scen.empty()) {
          auto [s, g] = parse_scen(read_file(scen), m, n);
          doc.instance = Instance{m.graph, s, g, gen_f};
        } else {
          doc.instance = gen_well_formed(m.graph, n, gen_f, seed);
        }
        doc.map = fs::relative(fs::absolute(map), fs::absolute(out.empty() || out == "-" ? "." : fs::path(out).parent_path()))
                      .string();
        for (Vertex v : doc.instance.starts) doc.start_cells.push_back(m.coordinates[v]);
        for (Vertex v : doc.instance.goals) doc.goal_cells.push_back(m.coordinates[v]);
      } else {
        doc.instance = gen_well_formed(random_grid(width, height, obstacles, seed), n, gen_f, seed);
      }
      emit(out, write_instance(doc));
      return 0;
    }
    if (*sat_cmd) {
      emit(out, write_instance(sat_to_mappcf(parse_dimacs(read_file(dimacs)), gen_f)));
      return 0;
    }
    if (*bench_cmd) {
      auto cfg = parse_bench_config(read_file(config));
      auto rows = run_jobs(expand_bench(cfg, fs::path(config).parent_path()), jobs);
      emit(out, write_results(rows));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
