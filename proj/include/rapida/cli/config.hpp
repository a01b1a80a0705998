#pragma once

// Run configuration: a flat `key = value` text file with dotted keys.
// Unknown keys are errors; missing keys keep the defaults below.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rapida/rma.hpp"
#include "rapida/tasks.hpp"

namespace rapida::cli {

struct RunConfig {
  tasks::TaskKind task = tasks::TaskKind::insert;
  std::string scene;  // empty: the built-in scene for the task
  int horizon = 200;
  int success_hold_steps = 5;
  double shaping_coeff = 0.01;
  double coverage_threshold = 0.9;
  double band_height = 0.05;
  int settle_steps = 20;
  double max_speed = observe::kDefaultMaxSpeed;

  rma::Variant variant = rma::Variant::full;
  rma::TrainConfig train;
  tasks::RandomizationRanges ranges;

  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2};  // ablation seeds
  int eval_episodes = 100;
  std::uint64_t eval_seed_base = ppo::kEvalSeedBase;
  bool eval_deterministic = true;
  int probe_grid = 16;
  std::string output = "runs/default";

  tasks::TaskSpec task_spec() const;
  void validate() const;
};

// key -> value, canonical (sorted) order.
std::map<std::string, std::string> to_entries(const RunConfig& config);
std::string emit_config(const RunConfig& config);
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
// Applies one `key=value` override; throws ConfigError naming the key.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// SHA-1 over the canonical emission, excluding `output` (where a run is
// written does not change what it computes).
std::string config_hash(const RunConfig& config);
// The emission without `output`; this is what checkpoints embed.
std::string canonical_config_text(const RunConfig& config);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seed precedence: explicit flag, then RAPIDA_SEED, then the config value.
std::uint64_t resolve_seed(const RunConfig& config, std::optional<std::uint64_t> flag);

// Lowercase hex SHA-1 of arbitrary bytes.
std::string sha1_hex(const std::string& bytes);

}  // namespace rapida::cli
