#include "apt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apt/errors.hpp"
#include "apt/textio.hpp"
#include "json.hpp"

namespace apt {

ModeMap::ModeMap(std::vector<Vector> centers_in, double radius)
    : centers(std::move(centers_in)), capture_radius(radius) {
  if (centers.empty()) throw Error("ModeMap: need at least one center");
  if (!(capture_radius > 0.0)) throw Error("ModeMap: capture radius must be positive");
  const std::size_t d = centers.front().size();
  for (const auto& c : centers)
    if (c.size() != d) throw DimensionMismatch("ModeMap: centers of mixed dimension");
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = centers[a][k] - centers[b][k];
        sq += diff * diff;
      }
      if (std::sqrt(sq) <= 2.0 * capture_radius)
        throw Error("ModeMap: centers " + std::to_string(a) + " and " + std::to_string(b) +
                    " closer than twice the capture radius");
    }
  }
}

int assign_mode(std::span<const double> x, const ModeMap& map) {
  const int d = map.center_dim();
  if (static_cast<int>(x.size()) < d)
    throw DimensionMismatch("assign_mode: point has fewer coordinates than the centers");
  const double radius_sq = map.capture_radius * map.capture_radius;
  int best = -1;
  double best_sq = std::numeric_limits<double>::infinity();
  for (int m = 0; m < map.modes(); ++m) {
    double sq = 0.0;
    for (int k = 0; k < d; ++k) {
      const double diff = x[k] - map.centers[m][k];
      sq += diff * diff;
    }
    // strict < keeps the earlier index on an exact tie
    if (sq <= radius_sq && sq < best_sq) {
      best = m;
      best_sq = sq;
    }
  }
  return best;
}

std::optional<ModeMap> mode_map_for_target(const TargetDensity& target) {
  if (const auto* mix = dynamic_cast<const GaussianMixture*>(&target))
    return ModeMap(mix->means(), 3.0 * mix->sigma());
  if (const auto* prod = dynamic_cast<const ProductExtendedTarget*>(&target))
    return mode_map_for_target(prod->base());
  return std::nullopt;
}

Vector occupancy_with_unassigned(const ModeCounter& counter) {
  Vector occ(counter.counts.size() + 1, 0.0);
  if (counter.total == 0) return occ;
  const double n = static_cast<double>(counter.total);
  for (std::size_t m = 0; m < counter.counts.size(); ++m)
    occ[m] = static_cast<double>(counter.counts[m]) / n;
  occ.back() = static_cast<double>(counter.unassigned) / n;
  return occ;
}

Vector mode_occupancy(const ModeCounter& counter) {
  Vector occ(counter.counts.size(), 0.0);
  const std::int64_t assigned = counter.total - counter.unassigned;
  if (assigned == 0) return occ;
  for (std::size_t m = 0; m < counter.counts.size(); ++m)
    occ[m] = static_cast<double>(counter.counts[m]) / static_cast<double>(assigned);
  return occ;
}

int missing_modes(const ModeCounter& counter) {
  int missing = 0;
  for (auto c : counter.counts)
    if (c == 0) ++missing;
  return missing;
}

double mode_mae(std::span<const double> occupancy) {
  const int m = static_cast<int>(occupancy.size());
  if (m == 0) throw Error("mode_mae: empty occupancy");
  const double share = 1.0 / m;
  double acc = 0.0;
  for (double t : occupancy) acc += std::abs(t - share) / share;
  return acc / m;
}

MomentEstimate moments_from_stats(const ChainStats& stats) {
  MomentEstimate e;
  if (!stats.mean.empty()) {
    e.ex1 = stats.mean[0];
    e.ex1sq = stats.mean_sq[0];
  }
  if (stats.mean.size() > 1) {
    e.ex2 = stats.mean[1];
    e.ex2sq = stats.mean_sq[1];
  }
  return e;
}

MomentEstimate mixture_truth_moments(const GaussianMixture& mixture) {
  const Vector m1 = mixture.moment1();
  const Vector m2 = mixture.moment2();
  MomentEstimate t;
  t.ex1 = m1[0];
  t.ex1sq = m2[0];
  if (m1.size() > 1) {
    t.ex2 = m1[1];
    t.ex2sq = m2[1];
  }
  return t;
}

MomentEstimate rmse_over_runs(std::span<const MomentEstimate> estimates,
                              const MomentEstimate& truth) {
  if (estimates.empty()) throw Error("rmse_over_runs: no estimates");
  MomentEstimate acc;
  for (const auto& e : estimates) {
    acc.ex1 += (e.ex1 - truth.ex1) * (e.ex1 - truth.ex1);
    acc.ex2 += (e.ex2 - truth.ex2) * (e.ex2 - truth.ex2);
    acc.ex1sq += (e.ex1sq - truth.ex1sq) * (e.ex1sq - truth.ex1sq);
    acc.ex2sq += (e.ex2sq - truth.ex2sq) * (e.ex2sq - truth.ex2sq);
  }
  const double n = static_cast<double>(estimates.size());
  return {std::sqrt(acc.ex1 / n), std::sqrt(acc.ex2 / n), std::sqrt(acc.ex1sq / n),
          std::sqrt(acc.ex2sq / n)};
}

RunSummary summarize_run(const ChainStats& stats, const ModeCounter& counter) {
  RunSummary s;
  s.occupancy = occupancy_with_unassigned(counter);
  s.missing_modes = missing_modes(counter);
  const Vector renorm = mode_occupancy(counter);
  s.mae = mode_mae(renorm);
  s.moments = moments_from_stats(stats);
  s.swap_acc = stats.swap_acceptance;
  s.rw_acc = stats.rw_acceptance;
  s.final_levels = stats.final_levels;
  return s;
}

namespace {

const GaussianMixture& mixture_of(const TargetDensity& target) {
  if (const auto* mix = dynamic_cast<const GaussianMixture*>(&target)) return *mix;
  if (const auto* prod = dynamic_cast<const ProductExtendedTarget*>(&target))
    return mixture_of(prod->base());
  throw ConfigError("target", "benchmark metrics need a mixture (or product-of-mixture) target");
}

BenchGroupResult aggregate_group(const BenchCell& cell,
                                 const std::vector<RunSummary>& summaries,
                                 const MomentEstimate& truth) {
  BenchGroupResult g;
  g.strategy = cell.strategy.name();
  g.levels = cell.levels;
  g.runs_completed = static_cast<int>(summaries.size());
  if (summaries.empty()) return g;
  std::vector<MomentEstimate> est;
  est.reserve(summaries.size());
  int no_missing = 0;
  for (const auto& s : summaries) {
    if (s.missing_modes == 0) ++no_missing;
    g.avg_missing += s.missing_modes;
    g.mae += s.mae;
    g.swap_acc += s.swap_acc;
    est.push_back(s.moments);
  }
  const double n = static_cast<double>(summaries.size());
  g.no_missing_pct = 100.0 * no_missing / n;
  g.avg_missing /= n;
  g.mae /= n;
  g.swap_acc /= n;
  g.rmse = rmse_over_runs(est, truth);
  return g;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config,
                      const std::function<void(const BenchReport&)>& flush,
                      const std::function<bool()>& should_stop) {
  if (config.grid.empty()) throw ConfigError("bench.grid", "empty benchmark grid");
  if (config.runs < 1) throw ConfigError("bench.runs", "must be at least 1");
  const ModeMap map = [&] {
    auto m = mode_map_for_target(*config.base.target);
    if (!m) throw ConfigError("target", "benchmark needs a mixture-backed target");
    return *m;
  }();
  const MomentEstimate truth = mixture_truth_moments(mixture_of(*config.base.target));

  std::vector<std::vector<RunSummary>> per_cell(config.grid.size());
  const int total_runs = static_cast<int>(config.grid.size()) * config.runs;
  int completed = 0;
  bool stopped = false;

  auto build_report = [&] {
    BenchReport rep;
    rep.runs_requested = config.runs;
    rep.partial = completed < total_runs;
    for (std::size_t c = 0; c < config.grid.size(); ++c)
      rep.groups.push_back(aggregate_group(config.grid[c], per_cell[c], truth));
    return rep;
  };

  for (std::size_t c = 0; c < config.grid.size() && !stopped; ++c) {
    for (int r = 0; r < config.runs; ++r) {
      if (should_stop && should_stop()) {
        stopped = true;
        break;
      }
      SamplerConfig cfg = config.base;
      cfg.strategy = config.grid[c].strategy;
      cfg.levels_initial = config.grid[c].levels;
      cfg.seed = config.base_seed + static_cast<std::uint64_t>(r);
      ModeCounter counter(map.modes());
      ChainStats stats = run(cfg, [&counter, &map](const StepRecord& rec) {
        counter.add(assign_mode(rec.positions[0], map));
      });
      per_cell[c].push_back(summarize_run(stats, counter));
      ++completed;
      if (flush) flush(build_report());
    }
  }
  return build_report();
}

std::string bench_report_csv(const BenchReport& report) {
  std::string out =
      "strategy,L,no_missing_pct,avg_missing,mae,rmse_EX1,rmse_EX2,rmse_EX1sq,rmse_EX2sq,"
      "swap_acc\n";
  for (const auto& g : report.groups) {
    out += g.strategy;
    out += ',';
    out += format_int(g.levels);
    out += ',';
    out += format_double(g.no_missing_pct);
    out += ',';
    out += format_double(g.avg_missing);
    out += ',';
    out += format_double(g.mae);
    out += ',';
    out += format_double(g.rmse.ex1);
    out += ',';
    out += format_double(g.rmse.ex2);
    out += ',';
    out += format_double(g.rmse.ex1sq);
    out += ',';
    out += format_double(g.rmse.ex2sq);
    out += ',';
    out += format_double(g.swap_acc);
    out += '\n';
  }
  return out;
}

std::string bench_report_json(const BenchReport& report) {
  nlohmann::ordered_json j;
  j["partial"] = report.partial;
  j["runs_requested"] = report.runs_requested;
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : report.groups) {
    nlohmann::ordered_json row;
    row["strategy"] = g.strategy;
    row["L"] = g.levels;
    row["runs_completed"] = g.runs_completed;
    row["no_missing_pct"] = g.no_missing_pct;
    row["avg_missing"] = g.avg_missing;
    row["mae"] = g.mae;
    row["rmse_EX1"] = g.rmse.ex1;
    row["rmse_EX2"] = g.rmse.ex2;
    row["rmse_EX1sq"] = g.rmse.ex1sq;
    row["rmse_EX2sq"] = g.rmse.ex2sq;
    row["swap_acc"] = g.swap_acc;
    j["groups"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace apt
