#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>

#include "oracles.hpp"

using namespace mappcf;
namespace fs = std::filesystem;

namespace {

struct Ran {
  int code;
  std::string out;
};

Ran run(const std::string& args) {
  const std::string cmd = std::string(MAPPCF_CLI_PATH) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t k = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), k);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("mappcf_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, SolveThenVerifyFig6) {
  ASSERT_EQ(run("gen fixture fig6 --out " + at("i.json")).code, 0);
  auto s = run("solve --instance " + at("i.json") + " --f 2 --out " + at("s.json"));
  ASSERT_EQ(s.code, 0) << s.out;
  EXPECT_NE(s.out.find("outcome=solved"), std::string::npos);
  const Solution sol = read_solution(read_file(at("s.json")));
  EXPECT_EQ(sol.plans[0].paths.size(), 4u);
  auto v = run("verify --instance " + at("i.json") + " --solution " + at("s.json") + " --f 2");
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_NE(v.out.find("verified"), std::string::npos);
}

TEST_F(Cli, CounterexampleWritesWitness) {
  Fixture fx = fixture("fig1");
  Solution sol = fx.references["syn"];
  sol.plans[1].rules.clear();
  write_file(at("i.json"), write_instance(fx.instance));
  write_file(at("s.json"), write_solution(sol));
  auto v = run("verify --instance " + at("i.json") + " --solution " + at("s.json"));
  EXPECT_EQ(v.code, 3) << v.out;
  const std::string w = read_file(at("s.json.witness.txt"));
  EXPECT_EQ(w.rfind("# witness syn crashes", 0), 0u);
  EXPECT_NE(w.find("t=1 init"), std::string::npos);
}

TEST_F(Cli, Fig8PinnedOrderFails) {
  ASSERT_EQ(run("gen fixture fig8 --out " + at("i.json") + " --priority-out " + at("p.txt")).code, 0);
  auto s = run("solve --instance " + at("i.json") + " --priority " + at("p.txt") + " --out " + at("s.json"));
  EXPECT_EQ(s.code, 2);
  EXPECT_NE(s.out.find("reason=no_backup"), std::string::npos) << s.out;
  auto d = run("solve --algo disjoint --instance " + at("i.json") + " --out " + at("d.json"));
  EXPECT_EQ(d.code, 0) << d.out;
}

TEST_F(Cli, SeqReferenceAndSimulation) {
  ASSERT_EQ(run("gen fixture fig1 --out " + at("i.json") + " --reference seq --reference-out " + at("s.json")).code,
            0);
  EXPECT_EQ(run("verify --instance " + at("i.json") + " --solution " + at("s.json")).code, 0);
  write_file(at("sched.txt"), "crash 0\nactivate 1\nactivate 1\nactivate 1\n");
  auto sim = run("simulate --instance " + at("i.json") + " --solution " + at("s.json") + " --schedule " +
                 at("sched.txt"));
  EXPECT_EQ(sim.code, 0) << sim.out;
  EXPECT_NE(sim.out.find("crash(0)"), std::string::npos);
  EXPECT_NE(sim.out.find("outcome all_arrived"), std::string::npos) << sim.out;
}

TEST_F(Cli, SeqAnonymousCounterexample) {
  ASSERT_EQ(run("gen fixture seq_anonymous --out " + at("i.json") + " --reference afd --reference-out " +
                at("s.json"))
                .code,
            0);
  EXPECT_EQ(run("verify --instance " + at("i.json") + " --solution " + at("s.json")).code, 3);
  // the witness file doubles as a schedule
  auto sim = run("simulate --instance " + at("i.json") + " --solution " + at("s.json") + " --schedule " +
                 at("s.json.witness.txt"));
  EXPECT_NE(sim.out.find("outcome stuck"), std::string::npos) << sim.out;
}

TEST_F(Cli, SatAndBench) {
  write_file(at("f.cnf"), "p cnf 2 2\n1 2 0\n-1 0\n");
  ASSERT_EQ(run("gen sat --dimacs " + at("f.cnf") + " --out " + at("sat.json")).code, 0);
  EXPECT_EQ(run("solve --algo disjoint --instance " + at("sat.json") + " --out " + at("d.json")).code, 0);
  write_file(at("b.json"),
             R"({"grid":{"width":8,"height":8,"obstacles":0.1},"n":[2],"f":[1],"instances_per_point":2,"timeout":5})");
  auto b = run("bench --config " + at("b.json") + " --jobs 2 --out " + at("r.csv"));
  ASSERT_EQ(b.code, 0) << b.out;
  const std::string csv = read_file(at("r.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(Cli, BadInput) {
  write_file(at("bad.json"), "{");
  EXPECT_EQ(run("solve --instance " + at("bad.json")).code, 1);
  EXPECT_NE(run("solve").code, 0);
}
