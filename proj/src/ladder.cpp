#include "apt/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apt/errors.hpp"
#include "apt/rwm.hpp"

namespace apt {

GapClamp default_gap_clamp() { return {1e-4, 1e6}; }

ReductionPolicy ReductionPolicy::parse(const std::string& text) {
  ReductionPolicy p;
  if (text == "off") {
    p.mode = Mode::Off;
  } else if (text == "strict") {
    p.mode = Mode::Strict;
  } else if (text.rfind("lenient:", 0) == 0) {
    p.mode = Mode::Lenient;
    try {
      p.epsilon = std::stod(text.substr(8));
    } catch (const std::exception&) {
      throw Error("ReductionPolicy: bad epsilon in '" + text + "'");
    }
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0))
      throw Error("ReductionPolicy: epsilon must lie in (0,1)");
  } else {
    throw Error("ReductionPolicy: unknown mode '" + text + "' (expected off, strict, lenient:<eps>)");
  }
  return p;
}

std::string ReductionPolicy::name() const {
  switch (mode) {
    case Mode::Off:
      return "off";
    case Mode::Strict:
      return "strict";
    case Mode::Lenient:
      return "lenient:" + std::to_string(epsilon);
  }
  return "?";
}

void LadderState::recompute_temps() {
  const int l = static_cast<int>(gaps.size()) + 1;
  temps.resize(l);
  temps[0] = 1.0;
  for (int k = 1; k < l; ++k) temps[k] = temps[k - 1] + gaps[k - 1];
  betas.resize(l);
  for (int k = 0; k < l; ++k) betas[k] = 1.0 / temps[k];
}

LadderState make_geometric_ladder(int initial_levels, double t_max, std::int64_t burn_in_gate,
                                  std::int64_t check_interval) {
  if (initial_levels < 2) throw Error("ladder: need at least two initial levels");
  if (!(t_max > 1.0)) throw Error("ladder: t_max must exceed 1");
  if (check_interval < 1) throw Error("ladder: check_interval must be positive");
  LadderState s;
  s.initial_levels = initial_levels;
  s.burn_in_gate = burn_in_gate;
  s.check_interval = check_interval;
  Vector temps(initial_levels);
  for (int l = 0; l < initial_levels; ++l)
    temps[l] = std::pow(t_max, static_cast<double>(l) / (initial_levels - 1));
  s.gaps.resize(initial_levels - 1);
  for (int l = 0; l + 1 < initial_levels; ++l) s.gaps[l] = temps[l + 1] - temps[l];
  s.recompute_temps();
  return s;
}

LadderState make_single_level_ladder() {
  LadderState s;
  s.initial_levels = 1;
  s.recompute_temps();
  return s;
}

Vector ladder_rates(const LadderState& ladder, std::span<const double> post_swap_energies) {
  const int l = ladder.levels();
  if (static_cast<int>(post_swap_energies.size()) != l)
    throw DimensionMismatch("ladder_rates: energies length does not match level count");
  Vector xi(std::max(l - 1, 0));
  for (int k = 0; k + 1 < l; ++k) {
    const double ei = post_swap_energies[k];
    const double ej = post_swap_energies[k + 1];
    if (!std::isfinite(ei) || !std::isfinite(ej)) {
      xi[k] = std::numeric_limits<double>::quiet_NaN();  // skip this gap
      continue;
    }
    xi[k] = std::exp(std::min(0.0, (ladder.betas[k + 1] - ladder.betas[k]) * (ei - ej)));
  }
  return xi;
}

void adapt_ladder_with_rates(LadderState& ladder, std::span<const double> xi, double gamma,
                             const GapClamp& clamp) {
  if (static_cast<int>(xi.size()) != ladder.levels() - 1)
    throw DimensionMismatch("adapt_ladder: rate vector length does not match gap count");
  for (std::size_t k = 0; k < ladder.gaps.size(); ++k) {
    if (!std::isfinite(xi[k])) continue;
    const double g = ladder.gaps[k] * std::exp(gamma * (xi[k] - kTargetAcceptance));
    ladder.gaps[k] = std::clamp(g, clamp.lo, clamp.hi);
  }
  ladder.recompute_temps();
}

void adapt_ladder(LadderState& ladder, std::span<const double> post_swap_energies, double gamma,
                  const GapClamp& clamp) {
  if (ladder.levels() < 2) return;
  const Vector xi = ladder_rates(ladder, post_swap_energies);
  adapt_ladder_with_rates(ladder, xi, gamma, clamp);
}

bool maybe_reduce_levels(LadderState& ladder, std::span<const double> thetas, int dim,
                         std::int64_t n, const ReductionPolicy& policy) {
  if (policy.mode == ReductionPolicy::Mode::Off) return false;
  if (n <= ladder.burn_in_gate) return false;
  if (n % ladder.check_interval != 0) return false;
  const int l = ladder.levels();
  if (static_cast<int>(thetas.size()) != l)
    throw DimensionMismatch("maybe_reduce_levels: theta vector length does not match level count");

  double threshold = 2.38 / std::sqrt(static_cast<double>(dim));
  if (policy.mode == ReductionPolicy::Mode::Lenient) {
    double best = 0.0;
    for (double t : thetas) best = std::max(best, (1.0 - policy.epsilon) * std::exp(t));
    threshold = std::min(threshold, best);
  }

  for (int k = 0; k < l; ++k) {
    if (std::exp(thetas[k]) >= threshold) {
      const int keep = k + 1;  // levels are 1-based in the criterion
      if (keep == l) return false;
      ladder.gaps.resize(keep - 1);
      ladder.recompute_temps();
      return true;
    }
  }
  return false;
}

}  // namespace apt
