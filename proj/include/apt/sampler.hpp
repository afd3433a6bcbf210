#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "apt/ladder.hpp"
#include "apt/rng.hpp"
#include "apt/rwm.hpp"
#include "apt/swap.hpp"
#include "apt/target.hpp"

namespace apt {

// Step size schedule gamma(n) = c * n^(-alpha), clamped below 1.  c = 0
// freezes every adaptation exactly.  The default c is deliberately below 1:
// every level starts at the same point with equal energies, so the first
// temperature-gap updates all push upward, and a full-size schedule
// compounds that into the gap clamp before the level energies separate.
struct GammaSchedule {
  double c = 0.25;
  double alpha = 0.6;
};

double gamma_at(std::int64_t n, const GammaSchedule& schedule);

struct SamplerConfig {
  std::shared_ptr<const TargetDensity> target;
  SwapStrategy strategy = SwapStrategy::ee();

  int levels_initial = 4;
  double t_max = 100.0;
  std::int64_t n0 = 0;  // burn-in gate for level reduction
  std::int64_t check_interval = 1000;
  ReductionPolicy reduction;  // off by default

  GammaSchedule gamma;
  std::int64_t burn_in = 0;
  std::int64_t main_iters = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t thin = 1;  // trace thinning, applied by writers only

  ThetaClamp theta_clamp = default_theta_clamp();
  GapClamp gap_clamp = default_gap_clamp();
  Vector start;  // empty: origin

  void validate() const;  // throws ConfigError naming the bad field
};

struct SamplerState {
  std::vector<LevelState> levels;
  LadderState ladder;
  std::int64_t n = 0;  // completed steps
  std::vector<Rng> level_rngs;
  Rng swap_rng;
};

// Level l draws from stream id l; the swap phase has its own stream, so the
// random walk phase can be partitioned across threads without changing any
// draw.  Truncated levels retire their streams; survivors keep theirs.
SamplerState make_sampler_state(const SamplerConfig& config);

struct RwInfo {
  double eta = 0.0;
  bool accepted = false;
};

// Everything observable about one step: the random walk etas, the swap
// attempt, the ladder rates, and the end-of-step positions / energies /
// temperatures (after any level truncation).
struct StepRecord {
  std::int64_t n = 0;  // 1-based step index from process start
  double gamma = 0.0;
  int levels_before = 0;
  int levels_after = 0;
  bool reduced = false;
  std::vector<RwInfo> rw;
  SwapRecord swap;  // i = -1 when fewer than two levels
  Vector xi;        // adjacent-pair rates, length levels_before - 1
  std::vector<Vector> positions;
  Vector energies;
  Vector temps;
};

// One full step: random walk, random walk adaptation, random swap,
// temperature scheme adaptation, level count adaptation, in that order,
// all with gamma(n+1).
StepRecord apt_step(SamplerState& state, const SamplerConfig& config);

// Chain-level diagnostics over the main phase (burn-in excluded).
struct ChainStats {
  int final_levels = 0;
  double swap_acceptance = 0.0;  // mean alpha over proposed swaps
  Vector rw_acceptance;          // mean eta per surviving level
  Vector mean;                   // level-1 chain, per coordinate
  Vector mean_sq;
  std::int64_t main_steps = 0;
};

using StepCallback = std::function<void(const StepRecord&)>;

// Runs burn_in + main_iters steps; the callback sees every main-phase
// record, unthinned.
ChainStats run(const SamplerConfig& config, const StepCallback& on_main_step = {});

// Convenience for tests: collected main-phase records plus the stats.
std::pair<std::vector<StepRecord>, ChainStats> run_collect(const SamplerConfig& config);

}  // namespace apt
