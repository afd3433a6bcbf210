#include "apt/rwm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apt/errors.hpp"

namespace apt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

ThetaClamp default_theta_clamp() { return {std::log(1e-3), std::log(1e3)}; }

LevelState make_level_state(const Vector& start, double beta, const TargetDensity& target) {
  if (static_cast<int>(start.size()) != target.dim())
    throw DimensionMismatch("make_level_state: start point has dim " +
                            std::to_string(start.size()) + ", target has dim " +
                            std::to_string(target.dim()));
  LevelState s;
  s.x = start;
  s.mu = start;
  s.sigma_chol = CholFactor(target.dim());
  s.theta = std::log(2.38 / std::sqrt(static_cast<double>(target.dim()))) - 0.5;
  s.beta = beta;
  s.last_eta = 0.0;
  s.energy = target.log_unnorm(start);
  return s;
}

RwResult rw_step(const LevelState& level, const TargetDensity& target, Rng& rng) {
  Vector y = sample_mvn(level.x, level.sigma_chol, std::exp(level.theta), rng);
  const double energy_y = target.log_unnorm(y);

  double log_eta;
  if (level.beta == 0.0) {
    log_eta = 0.0;  // infinite temperature accepts everything
  } else if (energy_y == kNegInf) {
    log_eta = kNegInf;
  } else if (level.energy == kNegInf) {
    log_eta = 0.0;  // any in-support proposal leaves a dead state
  } else {
    log_eta = std::min(0.0, level.beta * (energy_y - level.energy));
  }

  RwResult r;
  r.eta = std::exp(log_eta);
  const double u = uniform01(rng);
  r.accepted = std::log(u) < log_eta;
  if (r.accepted) {
    r.x_new = std::move(y);
    r.energy_new = energy_y;
  } else {
    r.x_new = level.x;
    r.energy_new = level.energy;
  }
  return r;
}

void adapt_level(LevelState& level, std::span<const double> x_tilde, double eta, double gamma,
                 const ThetaClamp& clamp) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("adapt_level: gamma must lie in [0,1)");
  if (gamma == 0.0) return;
  const int d = static_cast<int>(level.mu.size());
  if (static_cast<int>(x_tilde.size()) != d)
    throw DimensionMismatch("adapt_level: x has dim " + std::to_string(x_tilde.size()));

  Vector dev(d);
  for (int k = 0; k < d; ++k) dev[k] = x_tilde[k] - level.mu[k];
  level.sigma_chol = chol_rank_one_update(level.sigma_chol, gamma, dev);
  for (int k = 0; k < d; ++k) level.mu[k] = (1.0 - gamma) * level.mu[k] + gamma * x_tilde[k];
  level.theta =
      std::clamp(level.theta + gamma * (eta - kTargetAcceptance), clamp.lo, clamp.hi);
}

}  // namespace apt
