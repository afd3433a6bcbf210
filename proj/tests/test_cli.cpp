#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end checks against the installed binary; APTMC_BIN is provided by the
// build so the suite always exercises the freshly built executable.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file ", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("aptmc_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CliResult run_cli(const TempDir& dir, const std::string& args) {
  const fs::path log = dir.path / "cli.log";
  const std::string cmd =
      std::string(APTMC_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

fs::path write_run_config(const TempDir& dir, const std::string& name = "run.cfg") {
  const fs::path p = dir.path / name;
  std::ofstream out(p);
  out << R"({
    "target": {
      "type": "mixture",
      "weights": [0.5, 0.5],
      "means": [[-1.0, 0.0], [1.0, 0.0]],
      "sigma": 0.2
    },
    "strategy": "ee",
    "ladder": {"levels_initial": 3, "t_max": 50.0},
    "run": {"burn_in": 5, "main_iters": 40, "seed": 3}
  })";
  return p;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("run writes the four artifacts with exact headers") {
  TempDir dir("run");
  const fs::path cfg = write_run_config(dir);
  const fs::path out = dir.path / "out";
  CliResult r = run_cli(dir, "run --config " + cfg.string() + " --out " + out.string());
  CHECK_MESSAGE(r.exit_code == 0, r.output);

  const std::string trace = slurp(out / "trace.csv");
  CHECK(first_line(trace) == "iter,level,x_0,x_1,energy");
  // 40 main iterations, 3 levels each, plus the header.
  CHECK(count_lines(trace) == 1 + 40 * 3);

  CHECK(first_line(slurp(out / "swaps.csv")) == "iter,i,j,alpha,accepted");
  CHECK(first_line(slurp(out / "ladder.csv")) == "iter,L,T_1,T_2,T_3");

  json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("final_L") == 3);
  CHECK(summary.at("swap_acceptance").is_number());
  CHECK(summary.at("rw_acceptance").is_array());
  CHECK(summary.at("moments").at("EX1").is_number());
  CHECK(summary.at("moments").at("EX2sq").is_number());
  CHECK(summary.at("occupancy").size() == 3);  // two modes + unassigned bucket
  CHECK(summary.at("missing_modes").is_number());
  CHECK(summary.at("mae").is_number());
  CHECK(summary.at("config_echo").at("run").at("seed") == 3);
}

TEST_CASE("identical seeds reproduce the trace byte for byte") {
  TempDir dir("repro");
  const fs::path cfg = write_run_config(dir);
  const fs::path a = dir.path / "a";
  const fs::path b = dir.path / "b";
  const fs::path c = dir.path / "c";
  REQUIRE(run_cli(dir, "run --config " + cfg.string() + " --out " + a.string()).exit_code == 0);
  REQUIRE(run_cli(dir, "run --config " + cfg.string() + " --out " + b.string()).exit_code == 0);
  REQUIRE(run_cli(dir, "run --config " + cfg.string() + " --out " + c.string() + " --seed 4")
              .exit_code == 0);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  CHECK(slurp(a / "swaps.csv") == slurp(b / "swaps.csv"));
  CHECK(slurp(a / "trace.csv") != slurp(c / "trace.csv"));
}

TEST_CASE("thread count never changes the output") {
  TempDir dir("threads");
  const fs::path cfg = write_run_config(dir);
  const fs::path one = dir.path / "one";
  const fs::path many = dir.path / "many";
  REQUIRE(run_cli(dir, "run --config " + cfg.string() + " --out " + one.string() +
                           " --threads 1")
              .exit_code == 0);
  REQUIRE(run_cli(dir, "run --config " + cfg.string() + " --out " + many.string() +
                           " --threads 4")
              .exit_code == 0);
  CHECK(slurp(one / "trace.csv") == slurp(many / "trace.csv"));
  CHECK(slurp(one / "ladder.csv") == slurp(many / "ladder.csv"));
}

TEST_CASE("dedicated flags override --set") {
  TempDir dir("flags");
  const fs::path cfg = write_run_config(dir);
  const fs::path out = dir.path / "out";
  CliResult r = run_cli(dir, "run --config " + cfg.string() + " --out " + out.string() +
                                 " --set run.seed=5 --seed 9");
  REQUIRE(r.exit_code == 0);
  json summary = json::parse(slurp(out / "summary.json"));
  CHECK(summary.at("config_echo").at("run").at("seed") == 9);
}

TEST_CASE("validate runs the invariant suite") {
  TempDir dir("validate");
  CliResult listed = run_cli(dir, "validate --list");
  CHECK(listed.exit_code == 0);
  CHECK(count_lines(listed.output) == 7);
  CHECK(listed.output.find("PASS") == std::string::npos);

  CliResult r = run_cli(dir, "validate");
  CHECK(r.exit_code == 0);
  int passes = 0;
  std::istringstream ss(r.output);
  std::string line;
  while (std::getline(ss, line))
    if (line.rfind("PASS ", 0) == 0) ++passes;
  CHECK(passes == 7);
}

TEST_CASE("config errors exit with status 1") {
  TempDir dir("badcfg");
  CliResult missing = run_cli(dir, "run --config /nonexistent.cfg --out " +
                                       (dir.path / "out").string());
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("config error") != std::string::npos);

  const fs::path cfg = dir.path / "bad.cfg";
  std::ofstream(cfg) << R"({"target": {"type": "mixture"}})";
  CliResult bad = run_cli(dir, "run --config " + cfg.string() + " --out " +
                                   (dir.path / "out").string());
  CHECK(bad.exit_code == 1);

  CliResult noargs = run_cli(dir, "run");
  CHECK(noargs.exit_code != 0);  // CLI11 rejects the missing --config
}

TEST_CASE("bench writes reports and honors --stop-after") {
  TempDir dir("bench");
  const fs::path cfg = dir.path / "bench.cfg";
  std::ofstream(cfg) << R"({
    "target": {
      "type": "mixture",
      "weights": [0.5, 0.5],
      "means": [[-1.0, 0.0], [1.0, 0.0]],
      "sigma": 0.2
    },
    "run": {"burn_in": 5, "main_iters": 30, "seed": 2},
    "bench": {"runs": 2, "grid": "ee@2;al@2"}
  })";

  const fs::path full = dir.path / "full";
  CliResult r = run_cli(dir, "bench --config " + cfg.string() + " --out " + full.string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  CHECK(first_line(slurp(full / "report.csv")) ==
        "strategy,L,no_missing_pct,avg_missing,mae,"
        "rmse_EX1,rmse_EX2,rmse_EX1sq,rmse_EX2sq,swap_acc");
  json report = json::parse(slurp(full / "report.json"));
  CHECK(report.at("partial") == false);
  CHECK(report.at("runs_requested") == 2);
  REQUIRE(report.at("groups").size() == 2);
  CHECK(report.at("groups")[0].at("strategy") == "ee");
  CHECK(report.at("groups")[0].at("runs_completed") == 2);
  CHECK(report.at("groups")[1].at("strategy") == "al");

  const fs::path partial = dir.path / "partial";
  CliResult p = run_cli(dir, "bench --config " + cfg.string() + " --out " + partial.string() +
                                 " --stop-after 1");
  REQUIRE(p.exit_code == 0);
  CHECK(p.output.find("(partial)") != std::string::npos);
  json preport = json::parse(slurp(partial / "report.json"));
  CHECK(preport.at("partial") == true);

  // --grid and --runs override the config.
  const fs::path small = dir.path / "small";
  CliResult g = run_cli(dir, "bench --config " + cfg.string() + " --out " + small.string() +
                                 " --grid ra@2 --runs 1");
  REQUIRE(g.exit_code == 0);
  json greport = json::parse(slurp(small / "report.json"));
  REQUIRE(greport.at("groups").size() == 1);
  CHECK(greport.at("groups")[0].at("strategy") == "ra");
  CHECK(greport.at("groups")[0].at("runs_completed") == 1);
}
