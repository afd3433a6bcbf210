#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apt/bench.hpp"
#include "apt/sampler.hpp"
#include "json.hpp"

namespace apt {

// Config files are JSON with sections `target`, `strategy`, `ladder`,
// `schedule`, `run` (plus `bench` for the benchmark driver).  The target
// section is either an inline object ({"type": "mixture" | "product" |
// "bridge", ...}) or a path to a target file, resolved relative to the
// referencing file.  Unknown keys fail fast.

// A target plus the starting point its type implies: the origin for a
// mixture, base start plus interval midpoints for a product, the OLS
// coefficients and log residual standard deviation for a bridge model.
struct BuiltTarget {
  std::shared_ptr<const TargetDensity> target;
  Vector default_start;
};

BuiltTarget target_from_json(const nlohmann::ordered_json& spec,
                             const std::filesystem::path& base_dir);
BuiltTarget load_target_file(const std::filesystem::path& path);

// `key=value` with a dotted path, e.g. `ladder.levels_initial=2` or
// `run.seed=7`; the value is parsed as JSON when possible, else kept as a
// string.  Intermediate objects are created; traversing a non-object
// fails.
void apply_override(nlohmann::ordered_json& config, const std::string& assignment);

struct RunConfigBundle {
  SamplerConfig sampler;
  nlohmann::ordered_json echo;  // effective config after overrides
};

RunConfigBundle run_config_from_json(nlohmann::ordered_json config,
                                     const std::filesystem::path& base_dir,
                                     const std::vector<std::string>& overrides);
RunConfigBundle load_run_config(const std::filesystem::path& path,
                                const std::vector<std::string>& overrides);

struct BenchConfigBundle {
  BenchConfig bench;
  nlohmann::ordered_json echo;
};

BenchConfigBundle load_bench_config(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides);

// `ee@3,5;ra@9` reads as: EE at 3 and 5 levels, RA at 9.
std::vector<BenchCell> parse_grid_spec(const std::string& text);

}  // namespace apt
