#include "apt/swap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "apt/errors.hpp"

namespace apt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SwapStrategy SwapStrategy::rings(std::vector<double> boundaries) {
  for (std::size_t k = 1; k < boundaries.size(); ++k)
    if (!(boundaries[k] > boundaries[k - 1]))
      throw Error("SwapStrategy: ring boundaries must be strictly ascending");
  SwapStrategy s;
  s.variant = Variant::EnergyRings;
  s.ring_boundaries = std::move(boundaries);
  return s;
}

SwapStrategy SwapStrategy::parse(const std::string& text) {
  if (text == "ee") return ee();
  if (text == "al") return al();
  if (text == "ra") return ra();
  if (text.rfind("rings:", 0) == 0) {
    std::vector<double> bs;
    std::stringstream ss(text.substr(6));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        bs.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw Error("SwapStrategy: bad ring boundary '" + tok + "'");
      }
    }
    if (bs.empty()) throw Error("SwapStrategy: rings need at least one boundary");
    return rings(std::move(bs));
  }
  throw Error("SwapStrategy: unknown strategy '" + text + "' (expected ee, al, ra, rings:<...>)");
}

std::string SwapStrategy::name() const {
  switch (variant) {
    case Variant::EE:
      return "ee";
    case Variant::AL:
      return "al";
    case Variant::RA:
      return "ra";
    case Variant::EnergyRings: {
      std::string s = "rings:";
      for (std::size_t k = 0; k < ring_boundaries.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(ring_boundaries[k]);
      }
      return s;
    }
  }
  return "?";
}

int pair_count(int levels) { return levels * (levels - 1) / 2; }

int pair_index(int i, int j, int levels) {
  // lexicographic: (0,1),(0,2),...,(0,L-1),(1,2),...
  return i * levels - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_at(int index, int levels) {
  for (int i = 0; i < levels - 1; ++i) {
    const int row = levels - 1 - i;
    if (index < row) return {i, i + 1 + index};
    index -= row;
  }
  throw Error("pair_at: index out of range");
}

double PairDistribution::prob(int i, int j) const {
  return probs[pair_index(i, j, levels)];
}

std::pair<int, int> PairDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return pair_at(static_cast<int>(k), levels);
  }
  // u landed in the rounding tail; last pair with positive mass.
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return pair_at(static_cast<int>(k), levels);
  throw DegenerateSupport("PairDistribution: empty support");
}

namespace {

int ring_of(double energy, const std::vector<double>& boundaries) {
  return static_cast<int>(std::upper_bound(boundaries.begin(), boundaries.end(), energy) -
                          boundaries.begin());
}

PairDistribution normalize_log_weights(std::vector<double> logw, int levels) {
  double best = kNegInf;
  for (double w : logw) best = std::max(best, w);
  if (best == kNegInf)
    throw DegenerateSupport("proposal_probs: every pair weight is zero");
  double z = 0.0;
  for (double w : logw) z += std::exp(w - best);
  PairDistribution d;
  d.levels = levels;
  d.probs.resize(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k) d.probs[k] = std::exp(logw[k] - best) / z;
  return d;
}

}  // namespace

PairDistribution proposal_probs(const SwapStrategy& strategy, std::span<const double> energies,
                                int levels) {
  if (levels < 2) throw Error("proposal_probs: need at least two levels");
  if (static_cast<int>(energies.size()) != levels)
    throw DimensionMismatch("proposal_probs: energies length " + std::to_string(energies.size()) +
                            " does not match level count " + std::to_string(levels));
  const int np = pair_count(levels);

  switch (strategy.variant) {
    case SwapStrategy::Variant::RA: {
      PairDistribution d;
      d.levels = levels;
      d.probs.assign(np, 1.0 / np);
      return d;
    }
    case SwapStrategy::Variant::AL: {
      PairDistribution d;
      d.levels = levels;
      d.probs.assign(np, 0.0);
      for (int i = 0; i + 1 < levels; ++i)
        d.probs[pair_index(i, i + 1, levels)] = 1.0 / (levels - 1);
      return d;
    }
    case SwapStrategy::Variant::EE: {
      std::vector<double> logw(np, kNegInf);
      for (int i = 0; i < levels; ++i) {
        if (energies[i] == kNegInf) continue;
        for (int j = i + 1; j < levels; ++j) {
          if (energies[j] == kNegInf) continue;
          logw[pair_index(i, j, levels)] = -std::abs(energies[i] - energies[j]);
        }
      }
      return normalize_log_weights(std::move(logw), levels);
    }
    case SwapStrategy::Variant::EnergyRings: {
      std::vector<double> logw(np, kNegInf);
      for (int i = 0; i < levels; ++i) {
        if (energies[i] == kNegInf) continue;
        const int ri = ring_of(energies[i], strategy.ring_boundaries);
        for (int j = i + 1; j < levels; ++j) {
          if (energies[j] == kNegInf) continue;
          if (ring_of(energies[j], strategy.ring_boundaries) == ri)
            logw[pair_index(i, j, levels)] = 0.0;
        }
      }
      return normalize_log_weights(std::move(logw), levels);
    }
  }
  throw Error("proposal_probs: unreachable");
}

double swap_log_accept(std::span<const double> energies, std::span<const double> betas, int i,
                       int j) {
  return swap_log_accept_general(0.0, energies, betas, i, j);
}

double swap_log_accept_general(double log_proposal_ratio, std::span<const double> energies,
                               std::span<const double> betas, int i, int j) {
  double core;
  if (betas[i] == betas[j] || energies[i] == energies[j]) {
    core = 0.0;  // equal temperatures or equal energies (including both -inf)
  } else {
    core = (betas[j] - betas[i]) * (energies[i] - energies[j]);
  }
  return std::min(0.0, log_proposal_ratio + core);
}

double swap_accept_prob(const SwapStrategy& strategy, std::span<const double> energies,
                        std::span<const double> betas, int i, int j) {
  if (strategy.symmetric())
    return std::exp(swap_log_accept(energies, betas, i, j));
  // Non-symmetric strategies would recompute the proposal at T_ij(x) here.
  PairDistribution at_x = proposal_probs(strategy, energies, static_cast<int>(energies.size()));
  Vector swapped(energies.begin(), energies.end());
  std::swap(swapped[i], swapped[j]);
  PairDistribution at_tx = proposal_probs(strategy, swapped, static_cast<int>(energies.size()));
  const double ratio = std::log(at_tx.prob(i, j)) - std::log(at_x.prob(i, j));
  return std::exp(swap_log_accept_general(ratio, energies, betas, i, j));
}

SwapRecord swap_step(std::vector<LevelState>& levels, const SwapStrategy& strategy, Rng& rng) {
  const int n = static_cast<int>(levels.size());
  if (n < 2) throw Error("swap_step: need at least two levels");

  SwapRecord rec;
  rec.energies.resize(n);
  Vector betas(n);
  for (int l = 0; l < n; ++l) {
    rec.energies[l] = levels[l].energy;
    betas[l] = levels[l].beta;
  }

  PairDistribution dist;
  try {
    dist = proposal_probs(strategy, rec.energies, n);
  } catch (const DegenerateSupport&) {
    rec.degenerate = true;
    return rec;
  }

  const auto [i, j] = dist.sample(rng);
  rec.i = i;
  rec.j = j;
  rec.alpha = swap_accept_prob(strategy, rec.energies, betas, i, j);
  rec.accepted = uniform01(rng) < rec.alpha;
  if (rec.accepted) {
    std::swap(levels[i].x, levels[j].x);
    std::swap(levels[i].energy, levels[j].energy);
  }
  return rec;
}

}  // namespace apt
