#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "apt/linalg.hpp"

namespace apt {

// Clamp on the temperature gaps T_{l+1} - T_l; wide enough to be inert
// except in pathological early iterations.
struct GapClamp {
  double lo;
  double hi;
};

GapClamp default_gap_clamp();  // [1e-4, 1e6]

struct ReductionPolicy {
  enum class Mode { Off, Strict, Lenient };
  Mode mode = Mode::Off;
  double epsilon = 0.1;  // Lenient only

  // "off", "strict", or "lenient:<eps>".
  static ReductionPolicy parse(const std::string& text);
  std::string name() const;
};

// Temperature scheme T_1 = 1 < T_2 < ... < T_L with betas = 1/T.  The gaps
// are the primary state; temperatures are their cumulative sums, so a
// no-move update (every factor exactly 1) leaves them bit-identical.
struct LadderState {
  Vector gaps;   // length L-1
  Vector temps;  // length L, temps[0] == 1 exactly
  Vector betas;  // elementwise reciprocal of temps
  int initial_levels = 0;
  std::int64_t burn_in_gate = 0;  // reduction may act only for n > this
  std::int64_t check_interval = 1000;

  int levels() const { return static_cast<int>(temps.size()); }
  void recompute_temps();
};

// Geometric initial scheme T_l = t_max^((l-1)/(L0-1)).
LadderState make_geometric_ladder(int initial_levels, double t_max, std::int64_t burn_in_gate,
                                  std::int64_t check_interval);

// Degenerate one-level scheme (plain adaptive random walk; swap and ladder
// phases are no-ops).
LadderState make_single_level_ladder();

// Gap recursion driven by the adjacent-pair acceptance surrogate
//   xi_l = 1 ^ (pi(x_l)/pi(x_{l+1}))^(beta_{l+1} - beta_l)
// evaluated at the post-swap state with the current betas:
//   gap_l <- clamp(gap_l * exp(gamma * (xi_l - 0.234)))
// all from the old gaps, then temperatures are re-accumulated from T_1 = 1.
// Gaps whose xi involves a non-finite energy are left unchanged.
void adapt_ladder(LadderState& ladder, std::span<const double> post_swap_energies, double gamma,
                  const GapClamp& clamp);

// Same recursion with the rates supplied directly (xi entries outside [0,1]
// or non-finite skip their gap).
void adapt_ladder_with_rates(LadderState& ladder, std::span<const double> xi, double gamma,
                             const GapClamp& clamp);

// The rates the wrapper derives from energies; exposed for step records.
Vector ladder_rates(const LadderState& ladder, std::span<const double> post_swap_energies);

// Level-count criterion: outside the burn-in gate and on the check
// interval, truncate to the first level whose proposal scale exp(theta_l)
// reaches the threshold (2.38/sqrt(d), or the lenient variant's
// min(2.38/sqrt(d), max_l (1-eps) exp(theta_l))).  Returns true when the
// ladder shrank.  The level count never increases.
bool maybe_reduce_levels(LadderState& ladder, std::span<const double> thetas, int dim,
                         std::int64_t n, const ReductionPolicy& policy);

}  // namespace apt
