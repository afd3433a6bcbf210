#include "apt/config.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "apt/errors.hpp"

namespace apt {

namespace {

using json = nlohmann::ordered_json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", path.string() + ": " + e.what());
  }
}

void check_keys(const json& obj, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(section.empty() ? item.key() : section + "." + item.key(),
                        "unknown key");
  }
}

double get_double(const json& obj, const std::string& section, const std::string& key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(section + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& section, const std::string& key,
                     std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(section + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& section, const std::string& key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(section + "." + key, "expected a string");
  return v.get<std::string>();
}

Vector get_vector(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  Vector out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(field, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

BuiltTarget mixture_from_json(const json& spec) {
  check_keys(spec, "target", {"type", "weights", "means", "sigma"});
  if (!spec.contains("weights") || !spec.contains("means") || !spec.contains("sigma"))
    throw ConfigError("target", "mixture needs weights, means and sigma");
  Vector weights = get_vector(spec.at("weights"), "target.weights");
  if (!spec.at("means").is_array()) throw ConfigError("target.means", "expected a list of vectors");
  std::vector<Vector> means;
  means.reserve(spec.at("means").size());
  for (const auto& m : spec.at("means")) means.push_back(get_vector(m, "target.means"));
  const double sigma = get_double(spec, "target", "sigma", 0.0);
  try {
    auto mix = std::make_shared<GaussianMixture>(std::move(weights), std::move(means), sigma);
    Vector start(mix->dim(), 0.0);
    return {std::move(mix), std::move(start)};
  } catch (const Error& e) {
    throw ConfigError("target", e.what());
  }
}

BuiltTarget product_from_json(const json& spec, const std::filesystem::path& base_dir) {
  check_keys(spec, "target", {"type", "base", "extra_dims", "bounds"});
  if (!spec.contains("base") || !spec.contains("bounds"))
    throw ConfigError("target", "product needs base and bounds");
  BuiltTarget base = target_from_json(spec.at("base"), base_dir);
  if (!spec.at("bounds").is_array())
    throw ConfigError("target.bounds", "expected a list of [a,b] pairs");
  std::vector<std::pair<double, double>> bounds;
  for (const auto& b : spec.at("bounds")) {
    Vector pair = get_vector(b, "target.bounds");
    if (pair.size() != 2) throw ConfigError("target.bounds", "each bound must be [a,b]");
    bounds.emplace_back(pair[0], pair[1]);
  }
  const std::int64_t extra =
      get_int(spec, "target", "extra_dims", static_cast<std::int64_t>(bounds.size()));
  if (extra != static_cast<std::int64_t>(bounds.size()))
    throw ConfigError("target.extra_dims", "does not match the number of bounds");
  try {
    auto prod = std::make_shared<ProductExtendedTarget>(base.target, bounds);
    Vector start = base.default_start;
    for (const auto& [a, b] : bounds) start.push_back(0.5 * (a + b));
    return {std::move(prod), std::move(start)};
  } catch (const Error& e) {
    throw ConfigError("target", e.what());
  }
}

BuiltTarget bridge_from_json(const json& spec, const std::filesystem::path& base_dir) {
  check_keys(spec, "target", {"type", "csv_path", "lambda", "q"});
  const std::string csv = get_string(spec, "target", "csv_path", "");
  if (csv.empty()) throw ConfigError("target.csv_path", "bridge needs a csv_path");
  const std::filesystem::path resolved =
      std::filesystem::path(csv).is_absolute() ? std::filesystem::path(csv) : base_dir / csv;
  RegressionData data;
  try {
    data = load_regression_csv(resolved.string());
  } catch (const Error& e) {
    throw ConfigError("target.csv_path", e.what());
  }
  BridgeModel model;
  model.lambda = get_double(spec, "target", "lambda", 1.0);
  model.q = get_double(spec, "target", "q", 0.5);
  if (!(model.lambda > 0.0)) throw ConfigError("target.lambda", "must be positive");
  if (!(model.q > 0.0)) throw ConfigError("target.q", "must be positive");
  model.intercept_mu = data.report.response_shift;
  model.x = std::move(data.x);
  model.y = std::move(data.y);

  OlsFit fit;
  try {
    fit = ols_fit(model.x, model.y);
  } catch (const Error& e) {
    throw ConfigError("target.csv_path", std::string("OLS start failed: ") + e.what());
  }
  Vector start = fit.coeffs;
  start.push_back(0.5 * std::log(std::max(fit.resid_var, 1e-12)));
  return {std::make_shared<BridgeTarget>(std::move(model)), std::move(start)};
}

}  // namespace

BuiltTarget target_from_json(const nlohmann::ordered_json& spec,
                             const std::filesystem::path& base_dir) {
  if (spec.is_string()) {
    const std::string ref = spec.get<std::string>();
    const std::filesystem::path resolved =
        std::filesystem::path(ref).is_absolute() ? std::filesystem::path(ref) : base_dir / ref;
    return load_target_file(resolved);
  }
  if (!spec.is_object()) throw ConfigError("target", "expected an object or a file path");
  const std::string type = get_string(spec, "target", "type", "");
  if (type == "mixture") return mixture_from_json(spec);
  if (type == "product") return product_from_json(spec, base_dir);
  if (type == "bridge") return bridge_from_json(spec, base_dir);
  throw ConfigError("target.type", "expected mixture, product or bridge, got '" + type + "'");
}

BuiltTarget load_target_file(const std::filesystem::path& path) {
  return target_from_json(parse_json_file(path), path.parent_path());
}

void apply_override(nlohmann::ordered_json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;  // bare strings need no quotes
  }

  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError(path, "empty key segment in override");
    if (dot == std::string::npos) {
      if (!node->is_object() && !node->is_null())
        throw ConfigError(path, "cannot assign below a non-object value");
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->is_object() && !node->is_null())
      throw ConfigError(path, "cannot traverse through a non-object value");
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfigBundle run_config_from_json(nlohmann::ordered_json config,
                                     const std::filesystem::path& base_dir,
                                     const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) apply_override(config, o);
  if (!config.is_object()) throw ConfigError("config", "top level must be an object");
  check_keys(config, "", {"target", "strategy", "ladder", "schedule", "run", "bench"});
  if (!config.contains("target")) throw ConfigError("target", "missing target section");

  BuiltTarget built = target_from_json(config.at("target"), base_dir);

  SamplerConfig cfg;
  cfg.target = built.target;

  if (config.contains("strategy")) {
    const json& s = config.at("strategy");
    if (!s.is_string()) throw ConfigError("strategy", "expected a string");
    try {
      cfg.strategy = SwapStrategy::parse(s.get<std::string>());
    } catch (const Error& e) {
      throw ConfigError("strategy", e.what());
    }
  }

  const json ladder = config.value("ladder", json::object());
  check_keys(ladder, "ladder", {"levels_initial", "t_max", "n0", "check_interval", "reduction"});
  cfg.levels_initial = static_cast<int>(get_int(ladder, "ladder", "levels_initial", 4));
  cfg.t_max = get_double(ladder, "ladder", "t_max", 100.0);
  cfg.n0 = get_int(ladder, "ladder", "n0", 0);
  cfg.check_interval = get_int(ladder, "ladder", "check_interval", 1000);
  const std::string reduction = get_string(ladder, "ladder", "reduction", "off");
  try {
    cfg.reduction = ReductionPolicy::parse(reduction);
  } catch (const Error& e) {
    throw ConfigError("ladder.reduction", e.what());
  }

  const json schedule = config.value("schedule", json::object());
  check_keys(schedule, "schedule", {"c", "alpha"});
  const GammaSchedule schedule_defaults{};
  cfg.gamma.c = get_double(schedule, "schedule", "c", schedule_defaults.c);
  cfg.gamma.alpha = get_double(schedule, "schedule", "alpha", schedule_defaults.alpha);

  const json run = config.value("run", json::object());
  check_keys(run, "run", {"burn_in", "main_iters", "seed", "thin", "threads", "start"});
  cfg.burn_in = get_int(run, "run", "burn_in", 0);
  cfg.main_iters = get_int(run, "run", "main_iters", 1);
  const std::int64_t seed = get_int(run, "run", "seed", 1);
  if (seed < 0) throw ConfigError("run.seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.thin = get_int(run, "run", "thin", 1);
  cfg.threads = static_cast<int>(get_int(run, "run", "threads", 1));
  cfg.start = run.contains("start") ? get_vector(run.at("start"), "run.start")
                                    : std::move(built.default_start);

  cfg.validate();
  return {std::move(cfg), std::move(config)};
}

RunConfigBundle load_run_config(const std::filesystem::path& path,
                                const std::vector<std::string>& overrides) {
  return run_config_from_json(parse_json_file(path), path.parent_path(), overrides);
}

std::vector<BenchCell> parse_grid_spec(const std::string& text) {
  std::vector<BenchCell> cells;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t group_end = text.find(';', pos);
    if (group_end == std::string::npos) group_end = text.size();
    const std::string group = text.substr(pos, group_end - pos);
    pos = group_end + 1;
    if (group.empty()) continue;

    const std::size_t at = group.rfind('@');
    if (at == std::string::npos)
      throw ConfigError("grid", "group '" + group + "' must look like strategy@L1,L2,...");
    SwapStrategy strategy = SwapStrategy::ee();
    try {
      strategy = SwapStrategy::parse(group.substr(0, at));
    } catch (const Error& e) {
      throw ConfigError("grid", e.what());
    }
    const std::string levels_text = group.substr(at + 1);
    std::size_t lpos = 0;
    bool any = false;
    while (lpos <= levels_text.size()) {
      std::size_t comma = levels_text.find(',', lpos);
      if (comma == std::string::npos) comma = levels_text.size();
      const std::string tok = levels_text.substr(lpos, comma - lpos);
      lpos = comma + 1;
      if (tok.empty()) continue;
      try {
        cells.push_back({strategy, std::stoi(tok)});
        any = true;
      } catch (const std::exception&) {
        throw ConfigError("grid", "bad level count '" + tok + "'");
      }
    }
    if (!any) throw ConfigError("grid", "group '" + group + "' lists no level counts");
  }
  if (cells.empty()) throw ConfigError("grid", "empty grid specification");
  return cells;
}

BenchConfigBundle load_bench_config(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides) {
  json config = parse_json_file(path);
  RunConfigBundle base = run_config_from_json(std::move(config), path.parent_path(), overrides);

  const json bench = base.echo.value("bench", json::object());
  check_keys(bench, "bench", {"runs", "seed", "grid"});

  BenchConfigBundle bundle;
  bundle.bench.base = base.sampler;
  bundle.bench.runs = static_cast<int>(get_int(bench, "bench", "runs", 2));
  const std::int64_t base_seed =
      get_int(bench, "bench", "seed", static_cast<std::int64_t>(base.sampler.seed));
  if (base_seed < 0) throw ConfigError("bench.seed", "must be nonnegative");
  bundle.bench.base_seed = static_cast<std::uint64_t>(base_seed);

  if (!bench.contains("grid")) throw ConfigError("bench.grid", "missing benchmark grid");
  const json& grid = bench.at("grid");
  if (grid.is_string()) {
    bundle.bench.grid = parse_grid_spec(grid.get<std::string>());
  } else if (grid.is_array()) {
    for (const auto& cell : grid) {
      if (!cell.is_object()) throw ConfigError("bench.grid", "cells must be objects");
      check_keys(cell, "bench.grid", {"strategy", "levels"});
      SwapStrategy strategy = SwapStrategy::ee();
      try {
        strategy = SwapStrategy::parse(get_string(cell, "bench.grid", "strategy", "ee"));
      } catch (const Error& e) {
        throw ConfigError("bench.grid.strategy", e.what());
      }
      if (!cell.contains("levels")) throw ConfigError("bench.grid", "cell needs levels");
      const json& levels = cell.at("levels");
      if (levels.is_number_integer()) {
        bundle.bench.grid.push_back({strategy, levels.get<int>()});
      } else if (levels.is_array()) {
        for (const auto& l : levels) {
          if (!l.is_number_integer()) throw ConfigError("bench.grid.levels", "expected integers");
          bundle.bench.grid.push_back({strategy, l.get<int>()});
        }
      } else {
        throw ConfigError("bench.grid.levels", "expected an integer or list");
      }
    }
  } else {
    throw ConfigError("bench.grid", "expected a grid string or list of cells");
  }
  if (bundle.bench.grid.empty()) throw ConfigError("bench.grid", "empty benchmark grid");
  for (const auto& cell : bundle.bench.grid)
    if (cell.levels < 1) throw ConfigError("bench.grid.levels", "level counts must be positive");

  bundle.echo = std::move(base.echo);
  return bundle;
}

}  // namespace apt
