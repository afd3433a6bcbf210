#include "apt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "apt/errors.hpp"

namespace apt {

namespace {

constexpr std::uint64_t kSwapStreamId = 1u << 20;  // never collides with level ids

void rw_phase_range(SamplerState& state, const TargetDensity& target, double gamma,
                    const ThetaClamp& clamp, int lo, int hi, std::vector<RwInfo>& out) {
  for (int l = lo; l < hi; ++l) {
    LevelState& level = state.levels[l];
    RwResult r = rw_step(level, target, state.level_rngs[l]);
    adapt_level(level, r.x_new, r.eta, gamma, clamp);
    level.x = std::move(r.x_new);
    level.energy = r.energy_new;
    level.last_eta = r.eta;
    out[l] = {r.eta, r.accepted};
  }
}

// Contiguous partition; each worker touches only its own levels and their
// rng streams, so the schedule cannot change any draw.
void rw_phase(SamplerState& state, const TargetDensity& target, double gamma,
              const ThetaClamp& clamp, int threads, std::vector<RwInfo>& out) {
  const int l = static_cast<int>(state.levels.size());
  if (threads <= 1 || l <= 1) {
    rw_phase_range(state, target, gamma, clamp, 0, l, out);
    return;
  }
  const int workers = std::min(threads, l);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const int base = l / workers;
  const int rem = l % workers;
  int start = 0;
  for (int w = 0; w < workers; ++w) {
    const int count = base + (w < rem ? 1 : 0);
    const int lo = start;
    const int hi = start + count;
    start = hi;
    if (w + 1 == workers) {
      rw_phase_range(state, target, gamma, clamp, lo, hi, out);
    } else {
      pool.emplace_back([&state, &target, gamma, &clamp, lo, hi, &out] {
        rw_phase_range(state, target, gamma, clamp, lo, hi, out);
      });
    }
  }
  for (auto& t : pool) t.join();
}

}  // namespace

double gamma_at(std::int64_t n, const GammaSchedule& schedule) {
  if (n < 1) throw Error("gamma_at: step index must be positive");
  if (schedule.c == 0.0) return 0.0;
  const double g = schedule.c * std::pow(static_cast<double>(n), -schedule.alpha);
  return std::min(g, 0.999);
}

void SamplerConfig::validate() const {
  if (!target) throw ConfigError("target", "no target density configured");
  if (levels_initial < 1) throw ConfigError("ladder.levels_initial", "must be at least 1");
  if (levels_initial > 1 && !(t_max > 1.0)) throw ConfigError("ladder.t_max", "must exceed 1");
  if (n0 < 0) throw ConfigError("ladder.n0", "must be nonnegative");
  if (check_interval < 1) throw ConfigError("ladder.check_interval", "must be positive");
  if (gamma.c < 0.0) throw ConfigError("schedule.c", "must be nonnegative");
  if (!(gamma.alpha > 0.5 && gamma.alpha < 1.0))
    throw ConfigError("schedule.alpha", "must lie in (0.5, 1)");
  if (burn_in < 0) throw ConfigError("run.burn_in", "must be nonnegative");
  if (main_iters < 1) throw ConfigError("run.main_iters", "must be at least 1");
  if (threads < 1) throw ConfigError("run.threads", "must be at least 1");
  if (thin < 1) throw ConfigError("run.thin", "must be at least 1");
  if (!(theta_clamp.lo < theta_clamp.hi)) throw ConfigError("theta_clamp", "lo must be below hi");
  if (!(gap_clamp.lo > 0.0 && gap_clamp.lo < gap_clamp.hi))
    throw ConfigError("gap_clamp", "need 0 < lo < hi");
  if (!start.empty() && static_cast<int>(start.size()) != target->dim())
    throw ConfigError("run.start", "length does not match target dimension");
  if (reduction.mode == ReductionPolicy::Mode::Lenient &&
      !(reduction.epsilon > 0.0 && reduction.epsilon < 1.0))
    throw ConfigError("ladder.reduction", "lenient epsilon must lie in (0,1)");
}

SamplerState make_sampler_state(const SamplerConfig& config) {
  config.validate();
  SamplerState state;
  state.ladder = config.levels_initial == 1
                     ? make_single_level_ladder()
                     : make_geometric_ladder(config.levels_initial, config.t_max, config.n0,
                                             config.check_interval);
  state.ladder.burn_in_gate = config.n0;
  state.ladder.check_interval = config.check_interval;
  Vector start = config.start;
  if (start.empty()) start.assign(config.target->dim(), 0.0);
  const int l = state.ladder.levels();
  state.levels.reserve(l);
  state.level_rngs.reserve(l);
  for (int k = 0; k < l; ++k) {
    state.levels.push_back(make_level_state(start, state.ladder.betas[k], *config.target));
    state.level_rngs.push_back(make_stream(config.seed, static_cast<std::uint64_t>(k)));
  }
  state.swap_rng = make_stream(config.seed, kSwapStreamId);
  return state;
}

StepRecord apt_step(SamplerState& state, const SamplerConfig& config) {
  const TargetDensity& target = *config.target;
  const std::int64_t n_new = state.n + 1;
  const int l = static_cast<int>(state.levels.size());

  StepRecord rec;
  rec.n = n_new;
  rec.gamma = gamma_at(n_new, config.gamma);
  rec.levels_before = l;
  rec.rw.resize(l);

  rw_phase(state, target, rec.gamma, config.theta_clamp, config.threads, rec.rw);

  if (l >= 2) {
    rec.swap = swap_step(state.levels, config.strategy, state.swap_rng);

    Vector post_swap(l);
    for (int k = 0; k < l; ++k) post_swap[k] = state.levels[k].energy;
    rec.xi = ladder_rates(state.ladder, post_swap);
    adapt_ladder_with_rates(state.ladder, rec.xi, rec.gamma, config.gap_clamp);
    for (int k = 0; k < l; ++k) state.levels[k].beta = state.ladder.betas[k];

    if (config.reduction.mode != ReductionPolicy::Mode::Off) {
      Vector thetas(l);
      for (int k = 0; k < l; ++k) thetas[k] = state.levels[k].theta;
      rec.reduced = maybe_reduce_levels(state.ladder, thetas, target.dim(), n_new,
                                        config.reduction);
      if (rec.reduced) {
        state.levels.resize(state.ladder.levels());
        state.level_rngs.resize(state.ladder.levels());
      }
    }
  }

  state.n = n_new;
  const int la = static_cast<int>(state.levels.size());
  rec.levels_after = la;
  rec.positions.resize(la);
  rec.energies.resize(la);
  for (int k = 0; k < la; ++k) {
    rec.positions[k] = state.levels[k].x;
    rec.energies[k] = state.levels[k].energy;
  }
  rec.temps = state.ladder.temps;
  return rec;
}

ChainStats run(const SamplerConfig& config, const StepCallback& on_main_step) {
  config.validate();
  SamplerState state = make_sampler_state(config);
  const int d = config.target->dim();

  for (std::int64_t i = 0; i < config.burn_in; ++i) apt_step(state, config);

  Vector sum(d, 0.0);
  Vector sum_sq(d, 0.0);
  Vector eta_sum;
  double alpha_sum = 0.0;
  std::int64_t alpha_count = 0;

  for (std::int64_t i = 0; i < config.main_iters; ++i) {
    StepRecord rec = apt_step(state, config);
    const Vector& x0 = rec.positions[0];
    for (int k = 0; k < d; ++k) {
      sum[k] += x0[k];
      sum_sq[k] += x0[k] * x0[k];
    }
    if (eta_sum.size() < rec.rw.size()) eta_sum.resize(rec.rw.size(), 0.0);
    for (std::size_t k = 0; k < rec.rw.size(); ++k) eta_sum[k] += rec.rw[k].eta;
    if (rec.swap.i >= 0) {
      alpha_sum += rec.swap.alpha;
      ++alpha_count;
    }
    if (on_main_step) on_main_step(rec);
  }

  ChainStats stats;
  stats.final_levels = static_cast<int>(state.levels.size());
  stats.main_steps = config.main_iters;
  stats.swap_acceptance = alpha_count > 0 ? alpha_sum / static_cast<double>(alpha_count) : 0.0;
  stats.rw_acceptance.resize(stats.final_levels);
  for (int k = 0; k < stats.final_levels; ++k)
    stats.rw_acceptance[k] = eta_sum[k] / static_cast<double>(config.main_iters);
  stats.mean.resize(d);
  stats.mean_sq.resize(d);
  for (int k = 0; k < d; ++k) {
    stats.mean[k] = sum[k] / static_cast<double>(config.main_iters);
    stats.mean_sq[k] = sum_sq[k] / static_cast<double>(config.main_iters);
  }
  return stats;
}

std::pair<std::vector<StepRecord>, ChainStats> run_collect(const SamplerConfig& config) {
  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(config.main_iters));
  ChainStats stats = run(config, [&records](const StepRecord& r) { records.push_back(r); });
  return {std::move(records), std::move(stats)};
}

}  // namespace apt
