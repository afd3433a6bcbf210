#pragma once

#include <span>
#include <string>
#include <vector>

#include "apt/rng.hpp"
#include "apt/rwm.hpp"

namespace apt {

// Rule mapping the current energies (log pi at each level position) to a
// discrete proposal distribution over level pairs.
//  EE: p_ij proportional to exp(-|E_i - E_j|), over all pairs i<j.
//  AL: uniform over adjacent pairs.
//  RA: uniform over all pairs.
//  EnergyRings: p_ij proportional to 1{same energy ring}, rings cut at
//  user-supplied ascending boundaries.
struct SwapStrategy {
  enum class Variant { EE, AL, RA, EnergyRings };

  Variant variant = Variant::EE;
  std::vector<double> ring_boundaries;  // EnergyRings only, strictly ascending

  static SwapStrategy ee() { return {Variant::EE, {}}; }
  static SwapStrategy al() { return {Variant::AL, {}}; }
  static SwapStrategy ra() { return {Variant::RA, {}}; }
  static SwapStrategy rings(std::vector<double> boundaries);

  // "ee", "al", "ra", or "rings:<b1,b2,...>".
  static SwapStrategy parse(const std::string& text);
  std::string name() const;

  // All four built-in strategies satisfy p_ij(x) = p_ij(T_ij x), which
  // collapses the acceptance ratio to the standard PT form.
  bool symmetric() const { return true; }
};

// Discrete distribution over ordered pairs (i,j), i<j<L, 0-based, stored in
// lexicographic order.
struct PairDistribution {
  int levels = 0;
  std::vector<double> probs;  // size levels*(levels-1)/2, sums to 1

  double prob(int i, int j) const;
  // Inverse-CDF draw consuming one uniform.
  std::pair<int, int> sample(Rng& rng) const;
};

int pair_count(int levels);
int pair_index(int i, int j, int levels);
std::pair<int, int> pair_at(int index, int levels);

// Proposal distribution for the current energies.  Weights involving a
// -infinity energy are zero for the state-dependent strategies; throws
// DegenerateSupport when every weight vanishes (the caller treats the swap
// phase as a no-op).  EE weights are normalized in log space so arbitrarily
// shifted energies never underflow.
PairDistribution proposal_probs(const SwapStrategy& strategy, std::span<const double> energies,
                                int levels);

// log alpha for a symmetric strategy: 0 ^ (beta_j - beta_i)(E_i - E_j).
double swap_log_accept(std::span<const double> energies, std::span<const double> betas, int i,
                       int j);

/// General state-dependent form: the proposal ratio enters as
// log p_ij(T_ij x) - log p_ij(x).  Kept as the extension hook for
// non-symmetric strategies; for the built-ins the ratio is identically zero.
double swap_log_accept_general(double log_proposal_ratio, std::span<const double> energies,
                               std::span<const double> betas, int i, int j);

// Acceptance probability in [0,1]; dispatches to the simplified form for
// symmetric strategies.
double swap_accept_prob(const SwapStrategy& strategy, std::span<const double> energies,
                        std::span<const double> betas, int i, int j);

struct SwapRecord {
  int i = -1;  // 0-based pair; (-1,-1) when the proposal support degenerated
  int j = -1;
  double alpha = 0.0;
  bool accepted = false;
  bool degenerate = false;
  Vector energies;  // log pi(x_l) at proposal time
};

// One swap attempt: draw a pair, accept with probability alpha, and on
// acceptance exchange positions (and their cached energies) only.  The
// adaptation statistics mu, sigma, theta stay with their levels.
SwapRecord swap_step(std::vector<LevelState>& levels, const SwapStrategy& strategy, Rng& rng);

}  // namespace apt
