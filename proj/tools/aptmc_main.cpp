#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apt/bench.hpp"
#include "apt/config.hpp"
#include "apt/errors.hpp"
#include "apt/selfcheck.hpp"
#include "apt/textio.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::atomic<bool> g_interrupted{false};

void on_sigint(int) { g_interrupted.store(true); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw apt::Error("cannot write " + path.string());
  out << content;
}

ordered_json moments_json(const apt::ChainStats& stats) {
  ordered_json m;
  m["EX1"] = stats.mean.empty() ? ordered_json(nullptr) : ordered_json(stats.mean[0]);
  m["EX2"] = stats.mean.size() > 1 ? ordered_json(stats.mean[1]) : ordered_json(nullptr);
  m["EX1sq"] = stats.mean_sq.empty() ? ordered_json(nullptr) : ordered_json(stats.mean_sq[0]);
  m["EX2sq"] = stats.mean_sq.size() > 1 ? ordered_json(stats.mean_sq[1]) : ordered_json(nullptr);
  return m;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::vector<std::string> overrides) {
  apt::RunConfigBundle bundle = apt::load_run_config(config_path, overrides);
  const apt::SamplerConfig& cfg = bundle.sampler;
  const int d = cfg.target->dim();
  const int l0 = cfg.levels_initial;

  fs::create_directories(out_dir);
  std::ofstream trace(fs::path(out_dir) / "trace.csv", std::ios::binary | std::ios::trunc);
  std::ofstream swaps(fs::path(out_dir) / "swaps.csv", std::ios::binary | std::ios::trunc);
  std::ofstream ladder(fs::path(out_dir) / "ladder.csv", std::ios::binary | std::ios::trunc);
  if (!trace || !swaps || !ladder)
    throw apt::Error("cannot write output files under " + out_dir);

  std::string header = "iter,level";
  for (int k = 0; k < d; ++k) header += ",x_" + std::to_string(k);
  header += ",energy\n";
  trace << header;
  swaps << "iter,i,j,alpha,accepted\n";
  std::string ladder_header = "iter,L";
  for (int k = 1; k <= l0; ++k) ladder_header += ",T_" + std::to_string(k);
  ladder << ladder_header << '\n';

  std::optional<apt::ModeMap> map = apt::mode_map_for_target(*cfg.target);
  std::optional<apt::ModeCounter> counter;
  if (map) counter.emplace(map->modes());

  std::string row;
  apt::ChainStats stats = apt::run(cfg, [&](const apt::StepRecord& rec) {
    const std::int64_t iter = rec.n - cfg.burn_in;  // 1-based main-phase index
    if ((iter - 1) % cfg.thin == 0) {
      row.clear();
      for (int lv = 0; lv < rec.levels_after; ++lv) {
        row += apt::format_int(iter);
        row += ',';
        row += apt::format_int(lv + 1);
        for (double c : rec.positions[lv]) {
          row += ',';
          row += apt::format_double(c);
        }
        row += ',';
        row += apt::format_double(rec.energies[lv]);
        row += '\n';
      }
      trace << row;
    }

    row.clear();
    row += apt::format_int(iter);
    row += ',';
    row += apt::format_int(rec.swap.i >= 0 ? rec.swap.i + 1 : -1);
    row += ',';
    row += apt::format_int(rec.swap.j >= 0 ? rec.swap.j + 1 : -1);
    row += ',';
    row += apt::format_double(rec.swap.alpha);
    row += ',';
    row += rec.swap.accepted ? '1' : '0';
    row += '\n';
    swaps << row;

    row.clear();
    row += apt::format_int(iter);
    row += ',';
    row += apt::format_int(rec.levels_after);
    for (int k = 0; k < l0; ++k) {
      row += ',';
      if (k < static_cast<int>(rec.temps.size())) row += apt::format_double(rec.temps[k]);
    }
    row += '\n';
    ladder << row;

    if (counter) counter->add(apt::assign_mode(rec.positions[0], *map));
  });

  ordered_json summary;
  summary["final_L"] = stats.final_levels;
  summary["swap_acceptance"] = stats.swap_acceptance;
  summary["rw_acceptance"] = stats.rw_acceptance;
  summary["moments"] = moments_json(stats);
  if (counter) {
    summary["occupancy"] = apt::occupancy_with_unassigned(*counter);
    summary["missing_modes"] = apt::missing_modes(*counter);
    summary["mae"] = apt::mode_mae(apt::mode_occupancy(*counter));
  } else {
    summary["occupancy"] = ordered_json::array();
    summary["missing_modes"] = nullptr;
    summary["mae"] = nullptr;
  }
  summary["config_echo"] = bundle.echo;
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir,
              std::vector<std::string> overrides, std::int64_t stop_after) {
  apt::BenchConfigBundle bundle = apt::load_bench_config(config_path, overrides);
  fs::create_directories(out_dir);

  std::int64_t completed = 0;
  auto flush = [&](const apt::BenchReport& rep) {
    ++completed;
    write_file(fs::path(out_dir) / "report.csv", apt::bench_report_csv(rep));
    write_file(fs::path(out_dir) / "report.json", apt::bench_report_json(rep));
  };
  auto should_stop = [&] {
    return g_interrupted.load() || (stop_after >= 0 && completed >= stop_after);
  };

  std::signal(SIGINT, &on_sigint);
  apt::BenchReport report = apt::run_bench(bundle.bench, flush, should_stop);
  std::signal(SIGINT, SIG_DFL);

  write_file(fs::path(out_dir) / "report.csv", apt::bench_report_csv(report));
  write_file(fs::path(out_dir) / "report.json", apt::bench_report_json(report));
  std::cout << "wrote " << (fs::path(out_dir) / "report.csv").string()
            << (report.partial ? " (partial)" : "") << "\n";
  return 0;
}

int cmd_validate(bool list_only) {
  if (list_only) {
    for (const auto& name : apt::selfcheck_names()) std::cout << name << "\n";
    return 0;
  }
  bool all_passed = true;
  for (const auto& r : apt::run_all_selfchecks()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.detail;
    std::cout << "\n";
    all_passed = all_passed && r.passed;
  }
  return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive parallel tempering with state-dependent swaps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::int64_t seed = 0;
  int threads = 0;
  std::int64_t runs = 0;
  std::string grid;
  std::int64_t stop_after = -1;
  bool list_only = false;

  CLI::App* run_cmd = app.add_subcommand("run", "run one chain, write trace and summary");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (default .)");
  run_cmd->add_option("--set", overrides, "override, key=value (repeatable)");
  CLI::Option* run_seed = run_cmd->add_option("--seed", seed, "override run.seed");
  CLI::Option* run_threads = run_cmd->add_option("--threads", threads, "override run.threads");

  CLI::App* bench_cmd = app.add_subcommand("bench", "run the benchmark grid, write reports");
  bench_cmd->add_option("--config", config_path, "config file")->required();
  bench_cmd->add_option("--out", out_dir, "output directory (default .)");
  bench_cmd->add_option("--set", overrides, "override, key=value (repeatable)");
  CLI::Option* bench_runs = bench_cmd->add_option("--runs", runs, "override bench.runs");
  CLI::Option* bench_grid =
      bench_cmd->add_option("--grid", grid, "override grid, e.g. ee@3,5;ra@9");
  CLI::Option* bench_seed = bench_cmd->add_option("--seed", seed, "override bench.seed");
  CLI::Option* bench_threads =
      bench_cmd->add_option("--threads", threads, "override run.threads");
  bench_cmd->add_option("--stop-after", stop_after,
                        "stop launching runs after this many completed (testing hook)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "run the fast invariant suite");
  validate_cmd->add_flag("--list", list_only, "print property names without running");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      if (*run_seed) overrides.push_back("run.seed=" + std::to_string(seed));
      if (*run_threads) overrides.push_back("run.threads=" + std::to_string(threads));
      return cmd_run(config_path, out_dir, std::move(overrides));
    }
    if (bench_cmd->parsed()) {
      if (*bench_runs) overrides.push_back("bench.runs=" + std::to_string(runs));
      if (*bench_grid) overrides.push_back("bench.grid=" + grid);
      if (*bench_seed) overrides.push_back("bench.seed=" + std::to_string(seed));
      if (*bench_threads) overrides.push_back("run.threads=" + std::to_string(threads));
      return cmd_bench(config_path, out_dir, std::move(overrides), stop_after);
    }
    return cmd_validate(list_only);
  } catch (const apt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
