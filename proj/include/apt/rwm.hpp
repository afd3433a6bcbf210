#pragma once

#include <span>

#include "apt/linalg.hpp"
#include "apt/rng.hpp"
#include "apt/target.hpp"

namespace apt {

// Clamp for the log proposal scale theta.  Realizes the compact-projection
// stabilization with wide enough bounds to be inert in practice.
struct ThetaClamp {
  double lo;
  double hi;
};

ThetaClamp default_theta_clamp();  // [log 1e-3, log 1e3]

// Target acceptance rate for the Robbins-Monro recursions (random walk
// scale and temperature gaps alike).
inline constexpr double kTargetAcceptance = 0.234;

// One tempered chain: position, running mean and covariance estimates of
// the (untempered) target, log proposal scale, inverse temperature, and the
// cached unnormalized log-density at the current position.
struct LevelState {
  Vector x;
  Vector mu;              // running mean estimate
  CholFactor sigma_chol;  // running covariance estimate, factored
  double theta = 0.0;     // log proposal scale
  double beta = 1.0;      // inverse temperature, mirrored from the ladder
  double last_eta = 0.0;  // most recent acceptance probability
  double energy = 0.0;    // log pi(x), cached
};

// sigma = identity, mu = start, theta slightly below the unimodal optimum
// log(2.38/sqrt(d)) so the level-count criterion is not triggered spuriously
// right after the burn-in gate.
LevelState make_level_state(const Vector& start, double beta, const TargetDensity& target);

struct RwResult {
  Vector x_new;
  double energy_new;  // log pi(x_new)
  double eta;         // acceptance probability of this step
  bool accepted;
};

// Proposal Y = x + exp(theta) * L z, acceptance eta = exp(0 ^ beta*(log pi(Y)
// - log pi(x))), evaluated in log space.  Consumes dim normal draws plus one
// uniform from rng.
RwResult rw_step(const LevelState& level, const TargetDensity& target, Rng& rng);

// Mean / covariance / scale recursions with step size gamma in [0,1).
// The covariance update uses the pre-update mean, then the mean moves:
//   sigma' = (1-g) sigma + g (x - mu)(x - mu)^T
//   mu'    = (1-g) mu + g x
//   theta' = clamp(theta + g (eta - 0.234))
void adapt_level(LevelState& level, std::span<const double> x_tilde, double eta, double gamma,
                 const ThetaClamp& clamp);

}  // namespace apt
