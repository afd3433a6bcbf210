#include "apt/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "apt/errors.hpp"
#include "apt/ladder.hpp"
#include "apt/rwm.hpp"
#include "apt/sampler.hpp"
#include "apt/target.hpp"

namespace apt {

namespace {

std::string fmt(double v) { return std::to_string(v); }

double log_accept_core(std::span<const double> energies, std::span<const double> betas, int i,
                       int j, bool flip_sign) {
  double core = (betas[j] - betas[i]) * (energies[i] - energies[j]);
  if (flip_sign) core = -core;
  return std::min(0.0, core);
}

struct RandomCase {
  Vector energies;
  Vector betas;
};

RandomCase random_case(Rng& rng, int levels) {
  std::normal_distribution<double> energy_dist(0.0, 5.0);
  RandomCase c;
  c.energies.resize(levels);
  c.betas.resize(levels);
  for (int l = 0; l < levels; ++l) c.energies[l] = energy_dist(rng);
  for (int l = 0; l < levels; ++l) c.betas[l] = uniform01(rng);
  std::sort(c.betas.rbegin(), c.betas.rend());
  c.betas[0] = 1.0;
  return c;
}

}  // namespace

double max_detailed_balance_violation(const SwapStrategy& strategy, int cases, std::uint64_t seed,
                                      bool flip_sign) {
  Rng rng = make_stream(seed, 77);
  double worst = 0.0;
  for (int n = 0; n < cases; ++n) {
    const int levels = 2 + static_cast<int>(rng() % 5);
    RandomCase c = random_case(rng, levels);

    PairDistribution dist;
    try {
      dist = proposal_probs(strategy, c.energies, levels);
    } catch (const DegenerateSupport&) {
      continue;  // no co-ring pair; the caller's no-op case
    }

    // weight the pairs by the proposal so every supported pair is probed
    for (int i = 0; i < levels; ++i) {
      for (int j = i + 1; j < levels; ++j) {
        if (dist.prob(i, j) <= 0.0) continue;

        Vector swapped = c.energies;
        std::swap(swapped[i], swapped[j]);
        PairDistribution dist_swapped;
        try {
          dist_swapped = proposal_probs(strategy, swapped, levels);
        } catch (const DegenerateSupport&) {
          continue;
        }
        if (dist_swapped.prob(i, j) <= 0.0) continue;

        double lhs = 0.0;
        double rhs = 0.0;
        for (int l = 0; l < levels; ++l) {
          lhs += c.betas[l] * c.energies[l];
          rhs += c.betas[l] * swapped[l];
        }
        lhs += std::log(dist.prob(i, j));
        rhs += std::log(dist_swapped.prob(i, j));
        lhs += log_accept_core(c.energies, c.betas, i, j, flip_sign);
        rhs += log_accept_core(swapped, c.betas, i, j, flip_sign);

        const double denom = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs) / denom);
      }
    }
  }
  return worst;
}

namespace {

SelfCheckResult check_rank_one_update_oracle() {
  Rng rng = make_stream(11, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + static_cast<int>(rng() % 6);
    Matrix b(d, d);
    for (auto& v : b.data) v = normal(rng);
    Matrix a(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        double acc = r == c ? 1.0 : 0.0;  // B^T B + I, always SPD
        for (int k = 0; k < d; ++k) acc += b(k, r) * b(k, c);
        a(r, c) = acc;
      }
    const double gamma = 0.5 * uniform01(rng);
    Vector v(d);
    for (auto& e : v) e = 3.0 * normal(rng);

    CholFactor l = chol_from_dense(a);
    CholFactor updated = chol_rank_one_update(l, gamma, v);
    Matrix direct(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) direct(r, c) = (1.0 - gamma) * a(r, c) + gamma * v[r] * v[c];
    Matrix back = updated.reconstruct();

    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < d * d; ++k) {
      num += (back.data[k] - direct.data[k]) * (back.data[k] - direct.data[k]);
      den += direct.data[k] * direct.data[k];
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {"rank_one_update_oracle", worst < 1e-10, "max relative error " + fmt(worst)};
}

SelfCheckResult check_swap_detailed_balance() {
  const std::vector<SwapStrategy> strategies = {SwapStrategy::ee(), SwapStrategy::al(),
                                                SwapStrategy::ra(),
                                                SwapStrategy::rings({-5.0, 0.0, 5.0})};
  double worst = 0.0;
  for (const auto& s : strategies)
    worst = std::max(worst, max_detailed_balance_violation(s, 500, 2024));
  return {"swap_detailed_balance", worst < 1e-10, "max relative violation " + fmt(worst)};
}

SelfCheckResult check_swap_symmetry() {
  const std::vector<SwapStrategy> strategies = {SwapStrategy::ee(), SwapStrategy::al(),
                                                SwapStrategy::ra(),
                                                SwapStrategy::rings({-5.0, 0.0, 5.0})};
  Rng rng = make_stream(7, 3);
  double worst = 0.0;
  for (const auto& strategy : strategies) {
    for (int rep = 0; rep < 300; ++rep) {
      const int levels = 2 + static_cast<int>(rng() % 5);
      RandomCase c = random_case(rng, levels);
      PairDistribution dist;
      try {
        dist = proposal_probs(strategy, c.energies, levels);
      } catch (const DegenerateSupport&) {
        continue;
      }
      for (int i = 0; i < levels; ++i) {
        for (int j = i + 1; j < levels; ++j) {
          Vector swapped = c.energies;
          std::swap(swapped[i], swapped[j]);
          PairDistribution after;
          try {
            after = proposal_probs(strategy, swapped, levels);
          } catch (const DegenerateSupport&) {
            continue;
          }
          worst = std::max(worst, std::abs(dist.prob(i, j) - after.prob(i, j)));
        }
      }
    }
  }
  return {"swap_symmetry", worst < 1e-12, "max probability shift " + fmt(worst)};
}

SelfCheckResult check_ladder_fixed_point() {
  LadderState ladder = make_geometric_ladder(6, 100.0, 0, 1000);
  const Vector temps0 = ladder.temps;
  const Vector xi(ladder.levels() - 1, kTargetAcceptance);
  for (int n = 1; n <= 1000; ++n)
    adapt_ladder_with_rates(ladder, xi, gamma_at(n, {}), default_gap_clamp());
  bool identical = ladder.temps.size() == temps0.size();
  for (std::size_t k = 0; identical && k < temps0.size(); ++k)
    identical = ladder.temps[k] == temps0[k];
  return {"ladder_fixed_point", identical,
          identical ? "temperatures bit-identical" : "temperatures drifted"};
}

SelfCheckResult check_theta_fixed_point() {
  const GaussianMixture target({1.0}, {{0.0, 0.0}}, 1.0);
  LevelState level = make_level_state({0.0, 0.0}, 1.0, target);
  const double theta0 = level.theta;
  for (int n = 1; n <= 1000; ++n) {
    const Vector x = {0.5, -0.25};
    adapt_level(level, x, kTargetAcceptance, gamma_at(n, {}), default_theta_clamp());
  }
  const bool ok = level.theta == theta0;
  return {"theta_fixed_point", ok, ok ? "theta bit-identical" : "theta drifted"};
}

SelfCheckResult check_mvn_scale_equivalence() {
  Rng rng = make_stream(5, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 1 + static_cast<int>(rng() % 5);
    CholFactor l(d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c <= r; ++c) l.at(r, c) = (r == c) ? 0.5 + uniform01(rng) : normal(rng);
    Vector mean(d);
    for (auto& m : mean) m = normal(rng);
    const double scale = 0.1 + 3.0 * uniform01(rng);
    CholFactor scaled = l.scaled(scale);

    Rng r1 = make_stream(900 + rep, 0);
    Rng r2 = r1;
    const Vector a = sample_mvn(mean, l, scale, r1);
    const Vector b = sample_mvn(mean, scaled, 1.0, r2);
    for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return {"mvn_scale_equivalence", worst == 0.0, "max deviation " + fmt(worst)};
}

SelfCheckResult check_mixture_permutation_invariance() {
  Rng rng = make_stream(21, 9);
  std::normal_distribution<double> normal(0.0, 3.0);
  Vector weights = {0.1, 0.25, 0.3, 0.35};
  std::vector<Vector> means = {{0.0, 0.0}, {2.0, -1.0}, {-3.0, 4.0}, {5.0, 5.0}};
  const GaussianMixture forward(weights, means, 0.7);
  Vector weights_r(weights.rbegin(), weights.rend());
  std::vector<Vector> means_r(means.rbegin(), means.rend());
  const GaussianMixture reversed(weights_r, means_r, 0.7);

  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const Vector x = {normal(rng), normal(rng)};
    const double a = forward.log_unnorm(x);
    const double b = reversed.log_unnorm(x);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  return {"mixture_permutation_invariance", worst < 1e-14, "max relative gap " + fmt(worst)};
}

using CheckFn = SelfCheckResult (*)();

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks = {
      {"rank_one_update_oracle", &check_rank_one_update_oracle},
      {"swap_detailed_balance", &check_swap_detailed_balance},
      {"swap_symmetry", &check_swap_symmetry},
      {"ladder_fixed_point", &check_ladder_fixed_point},
      {"theta_fixed_point", &check_theta_fixed_point},
      {"mvn_scale_equivalence", &check_mvn_scale_equivalence},
      {"mixture_permutation_invariance", &check_mixture_permutation_invariance},
  };
  return checks;
}

}  // namespace

std::vector<std::string> selfcheck_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

SelfCheckResult run_selfcheck(const std::string& name) {
  for (const auto& [n, fn] : registry())
    if (n == name) return fn();
  throw Error("unknown selfcheck '" + name + "'");
}

std::vector<SelfCheckResult> run_all_selfchecks() {
  std::vector<SelfCheckResult> results;
  for (const auto& [name, fn] : registry()) results.push_back(fn());
  return results;
}

}  // namespace apt
