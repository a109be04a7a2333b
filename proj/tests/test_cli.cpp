#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

// Drives the installed binary end to end; UPLAN_CLI_PATH is injected by the
// build so the test always runs the freshly built tool.

namespace {

namespace fs = std::filesystem;

struct run_result {
  int exit_code;
  std::string output;  // stdout + stderr
};

run_result run(const std::string& args) {
  std::string cmd = std::string(UPLAN_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  int status = pclose(pipe);
  return run_result{WEXITSTATUS(status), out};
}

struct temp_dir {
  fs::path path;
  temp_dir() {
    path = fs::temp_directory_path() /
           ("uplan_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~temp_dir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("generate, plan, query, simulate") {
  temp_dir tmp;
  std::string domain = tmp.file("rb.nadl");
  std::string plan = tmp.file("rb.plan");

  auto gen = run("gen robot-baby -o " + domain);
  REQUIRE(gen.exit_code == 0);

  auto planned = run("plan " + domain + " -a optimistic -o " + plan + " --stats");
  REQUIRE(planned.exit_code == 0);
  CHECK(planned.output.find("iter 1 new_states 1") != std::string::npos);
  CHECK(planned.output.find("SUCCESS iterations=3") != std::string::npos);
  CHECK(planned.output.find("covered_states=3") != std::string::npos);

  auto q = run("query " + plan + " -s pos=0,robot_works=1");
  CHECK(q.exit_code == 0);
  CHECK(q.output == "Robot=Lift-Block\n");

  // no advice at an unrecoverable state and inside the goal, still exit 0
  auto dead = run("query " + plan + " -s pos=1,robot_works=0");
  CHECK(dead.exit_code == 0);
  CHECK(dead.output.empty());
  auto goal = run("query " + plan + " -s pos=3,robot_works=1");
  CHECK(goal.exit_code == 0);
  CHECK(goal.output.empty());

  auto sim = run("simulate " + plan + " " + domain +
                 " -s pos=0,robot_works=1 --exhaustive");
  CHECK(sim.exit_code == 0);
  CHECK(sim.output == "best 3\nworst inf-deadend\n");

  auto trace = run("simulate " + plan + " " + domain +
                   " -s pos=0,robot_works=1 --seed 11");
  CHECK(trace.output.find("seed 11") == 0);
  CHECK(trace.output.find("step 1 state pos=0,robot_works=1 action "
                          "Robot=Lift-Block env Baby=") != std::string::npos);
  // identical seed, identical trace
  auto trace2 = run("simulate " + plan + " " + domain +
                    " -s pos=0,robot_works=1 --seed 11");
  CHECK(trace.output == trace2.output);

  // simulating from a goal state is an empty trace
  auto at_goal = run("simulate " + plan + " " + domain +
                     " -s pos=3,robot_works=0 --seed 1");
  CHECK(at_goal.exit_code == 0);
  CHECK(at_goal.output.find("goal reached after 0 steps") != std::string::npos);
}

TEST_CASE("exit codes per outcome class") {
  temp_dir tmp;
  std::string domain = tmp.file("rb.nadl");
  REQUIRE(run("gen robot-baby -o " + domain).exit_code == 0);

  auto strong = run("plan " + domain + " -a strong");
  CHECK(strong.exit_code == 1);
  CHECK(strong.output == "No strong plan exists\n");
  CHECK(run("plan " + domain + " -a strong-cyclic").exit_code == 1);

  auto missing = run("plan " + tmp.file("nope.nadl"));
  CHECK(missing.exit_code == 3);

  std::ofstream bad(tmp.file("bad.nadl"));
  bad << "variables bool a\nsystem\n";
  bad.close();
  auto parse_fail = run("plan " + tmp.file("bad.nadl"));
  CHECK(parse_fail.exit_code == 2);
  CHECK(parse_fail.output.find("ERROR") != std::string::npos);

  std::ofstream invalid(tmp.file("invalid.nadl"));
  invalid << "variables nat(1) x\nsystem\n  agt: A\n    a con: x pre: true "
             "eff: x' = x\ninitially true\ngoal true\n";
  invalid.close();
  auto validate_fail = run("plan " + tmp.file("invalid.nadl"));
  CHECK(validate_fail.exit_code == 2);
  CHECK(validate_fail.output.find("range-too-small") != std::string::npos);

  auto bad_state = run("query " + domain + " -s pos=0");  // not a plan file
  CHECK(bad_state.exit_code == 2);

  auto usage = run("plan");
  CHECK(usage.exit_code == 2);
}

TEST_CASE("deterministic planning prints the sequential plan") {
  temp_dir tmp;
  std::string domain = tmp.file("movie.nadl");
  REQUIRE(run("gen movie --objects 5 -o " + domain).exit_code == 0);
  auto planned = run("plan " + domain + " -a deterministic -o " + tmp.file("m.plan"));
  REQUIRE(planned.exit_code == 0);
  CHECK(planned.output.find("sequence_length 7") != std::string::npos);
  CHECK(planned.output.find("step 7 ") != std::string::npos);

  // a nondeterministic domain is rejected up front
  std::string rb = tmp.file("rb.nadl");
  REQUIRE(run("gen robot-baby -o " + rb).exit_code == 0);
  auto rejected = run("plan " + rb + " -a deterministic");
  CHECK(rejected.exit_code == 2);
}

TEST_CASE("plan files round trip through the tool") {
  temp_dir tmp;
  std::string domain = tmp.file("d1.nadl");
  std::string plan = tmp.file("d1.plan");
  REQUIRE(run("gen domain1 -n 5 -o " + domain).exit_code == 0);
  REQUIRE(run("plan " + domain + " -a optimistic -o " + plan).exit_code == 0);
  auto q0 = run("query " + plan + " -s pos=0");
  CHECK(q0.output == "Mover=dashed\n");
  auto q4 = run("query " + plan + " -s pos=4");
  CHECK(q4.output == "Mover=solid\n");
  auto ex = run("simulate " + plan + " " + domain + " -s pos=0 --exhaustive");
  CHECK(ex.output == "best 1\nworst inf\n");

  // a plan file from one domain does not drive another
  std::string other = tmp.file("d2.nadl");
  REQUIRE(run("gen domain2 -n 5 -o " + other).exit_code == 0);
  auto mismatch = run("simulate " + plan + " " + other + " -s pos=0 --seed 1");
  CHECK(mismatch.exit_code == 2);
  CHECK(mismatch.output.find("does not fit") != std::string::npos);
}
