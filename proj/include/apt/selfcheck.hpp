#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apt/swap.hpp"

namespace apt {

struct SelfCheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // filled on failure, or with a short measurement
};

// Names in execution order; run_selfcheck accepts any of them.
std::vector<std::string> selfcheck_names();
SelfCheckResult run_selfcheck(const std::string& name);
std::vector<SelfCheckResult> run_all_selfchecks();

// Largest relative violation of the pointwise detailed-balance identity
//   exp(sum_l beta_l E_l) p_ij(x) alpha_ij(x) =
//   exp(sum_l beta_l E_l') p_ij(x') alpha_ij(x')   with x' = T_ij x
// over randomized (state, beta, pair) draws.  flip_sign negates the
// exponent inside alpha, which must make the violation blow up; the checks
// use it as a canary that the probe has teeth.
double max_detailed_balance_violation(const SwapStrategy& strategy, int cases, std::uint64_t seed,
                                      bool flip_sign = false);

}  // namespace apt
