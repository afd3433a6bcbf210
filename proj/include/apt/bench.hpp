#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apt/sampler.hpp"
#include "apt/target.hpp"

namespace apt {

// Radius-based mode regions.  Centers must be separated by more than twice
// the capture radius so the regions cannot overlap.
struct ModeMap {
  std::vector<Vector> centers;
  double capture_radius;

  ModeMap(std::vector<Vector> centers, double capture_radius);
  int modes() const { return static_cast<int>(centers.size()); }
  int center_dim() const { return static_cast<int>(centers.front().size()); }
};

// Nearest center within the capture radius, judged on the first center_dim
// coordinates of x (extra product dimensions carry no mode information);
// -1 when no center is in range.  Ties break to the lowest index.
int assign_mode(std::span<const double> x, const ModeMap& map);

// Mixture means with radius 3 sigma; for a product target, the base
// mixture's means.  Empty when the target has no mixture structure.
std::optional<ModeMap> mode_map_for_target(const TargetDensity& target);

struct ModeCounter {
  explicit ModeCounter(int modes) : counts(modes, 0) {}
  void add(int assigned) {
    ++total;
    if (assigned < 0)
      ++unassigned;
    else
      ++counts[assigned];
  }
  std::vector<std::int64_t> counts;
  std::int64_t unassigned = 0;
  std::int64_t total = 0;
};

// Shares per mode plus a trailing unassigned bucket; sums to 1 when any
// sample was counted.
Vector occupancy_with_unassigned(const ModeCounter& counter);

// Shares over the modes only, renormalized over assigned samples; all zero
// when nothing was assigned.
Vector mode_occupancy(const ModeCounter& counter);

int missing_modes(const ModeCounter& counter);

// Mean absolute error of time spent per mode against the uniform share:
// (1/m) sum |t_i - 1/m| / (1/m).  An all-zero occupancy scores 1.
double mode_mae(std::span<const double> occupancy);

// First and second raw moments of the first two coordinates.
struct MomentEstimate {
  double ex1 = 0.0;
  double ex2 = 0.0;
  double ex1sq = 0.0;
  double ex2sq = 0.0;
};

MomentEstimate moments_from_stats(const ChainStats& stats);

// Closed form: E X = sum w_i mu_i, E X^2 = sum w_i (mu_i^2 + sigma^2).
MomentEstimate mixture_truth_moments(const GaussianMixture& mixture);

// Per-moment root mean square deviation from the truth.
MomentEstimate rmse_over_runs(std::span<const MomentEstimate> estimates,
                              const MomentEstimate& truth);

struct RunSummary {
  Vector occupancy;  // modes plus unassigned bucket
  int missing_modes = 0;
  double mae = 0.0;
  MomentEstimate moments;
  double swap_acc = 0.0;
  Vector rw_acc;
  int final_levels = 0;
};

RunSummary summarize_run(const ChainStats& stats, const ModeCounter& counter);

// One grid cell of the benchmark: a strategy at a fixed initial level count.
struct BenchCell {
  SwapStrategy strategy;
  int levels;
};

struct BenchConfig {
  SamplerConfig base;           // target, schedule, iteration counts
  std::vector<BenchCell> grid;  // strategy / level combinations
  int runs = 2;
  std::uint64_t base_seed = 1;  // run r uses base_seed + r
};

struct BenchGroupResult {
  std::string strategy;
  int levels = 0;
  int runs_completed = 0;
  double no_missing_pct = 0.0;
  double avg_missing = 0.0;
  double mae = 0.0;
  MomentEstimate rmse;
  double swap_acc = 0.0;
};

struct BenchReport {
  std::vector<BenchGroupResult> groups;
  int runs_requested = 0;
  bool partial = false;
};

// flush (optional) receives the cumulative report after every completed
// run; should_stop (optional) is polled before each run and marks the
// final report partial when it fires.
BenchReport run_bench(const BenchConfig& config,
                      const std::function<void(const BenchReport&)>& flush = {},
                      const std::function<bool()>& should_stop = {});

std::string bench_report_csv(const BenchReport& report);
std::string bench_report_json(const BenchReport& report);

}  // namespace apt
