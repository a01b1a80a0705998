#pragma once

// The train / eval / ablate / probe / plot commands. Each returns a process
// exit code and writes human-readable progress to `log`.

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rapida/cli/checkpoint.hpp"
#include "rapida/cli/config.hpp"
#include "rapida/cli/report.hpp"

namespace rapida::cli {

// Bad command-line usage; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainOptions {
  std::string config_path;  // empty: defaults
  std::vector<std::string> overrides;  // "key=value"
  int phase = 1;
  std::optional<std::string> from;
  bool allow_config_mismatch = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
};

struct EvalOptions {
  std::string checkpoint;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed_base;
  bool stochastic = false;
  std::optional<std::string> output;  // default: the checkpoint's directory
};

struct AblateOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::vector<std::string> variants{"full", "no_adapt", "no_shape", "e2e"};
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::string> output;
  bool fresh = false;  // ignore completed cells recorded in the manifest
};

struct ProbeOptions {
  std::string checkpoint;
  std::optional<int> grid;
  std::optional<std::string> output;
};

struct PlotOptionsCli {
  std::vector<std::string> inputs;
  std::string output = ".";
  bool compare = false;
};

int cmd_train(const TrainOptions& options, std::ostream& log);
int cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& log);
int cmd_ablate(const AblateOptions& options, std::ostream& out, std::ostream& log);
int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& log);
int cmd_plot(const PlotOptionsCli& options, std::ostream& log);

// Shared pieces, exposed for tests.
RunConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides,
                         std::optional<std::uint64_t> seed_flag);
RunConfig config_from_checkpoint(const Checkpoint& ckpt);
std::vector<std::uint64_t> eval_seeds(std::uint64_t base, int episodes);
// Reads "key = value" lines (run manifests).
std::map<std::string, std::string> read_manifest(const std::string& path);
// Training episode seeds recorded next to a run manifest.
std::vector<std::uint64_t> read_seed_list(const std::string& path);

}  // namespace rapida::cli
