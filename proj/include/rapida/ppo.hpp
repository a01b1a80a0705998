#pragma once

// Proximal policy optimisation with generalised advantage estimation.
//
// PPO sees environments only through PolicyEnv: a flat policy input vector,
// an opaque per-step context (whatever the caller needs to rebuild that input
// with gradients at update time) and a step function.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rapida/common.hpp"
#include "rapida/tensor.hpp"

namespace rapida::ppo {

struct PPOConfig {
  double gamma = 0.99;
  double lambda_gae = 0.95;
  double clip_epsilon = 0.2;
  int epochs_per_update = 4;
  int minibatch_size = 512;
  double entropy_coeff = 0.01;
  double value_coeff = 0.5;
  int rollout_length = 256;
  int num_envs = 8;
  double max_grad_norm = 0.5;
  double learning_rate = 3e-4;

  void validate() const;
};

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 1.0;
inline const double kLogStdInit = std::log(0.5);

// Gaussian head with a learned, state-independent log standard deviation.
struct GaussianPolicy {
  tensor::Mlp mean_net;
  tensor::Tensor log_std;  // [1, action_dim]

  GaussianPolicy() = default;
  GaussianPolicy(const std::vector<std::size_t>& dims, Rng& rng, double output_gain = 0.01);

  std::size_t input_width() const { return mean_net.input_width(); }
  std::size_t action_dim() const { return mean_net.output_width(); }
  std::vector<double> clamped_log_std() const;
  // Closed-form entropy sum(log_std + 1/2 log(2 pi e)) with the clamp applied.
  double entropy() const;
  void collect_parameters(const std::string& prefix, tensor::ParameterList& out) const;
  GaussianPolicy clone() const;
};

struct ValueHead {
  tensor::Mlp net;

  ValueHead() = default;
  ValueHead(const std::vector<std::size_t>& dims, Rng& rng) : net(dims, rng) {}
  void collect_parameters(const std::string& prefix, tensor::ParameterList& out) const;
  ValueHead clone() const;
};

struct ActResult {
  std::vector<double> action;
  std::vector<double> mean;
  double log_prob = 0.0;
  double value = 0.0;
};

// Samples (or takes the mean of) the Gaussian head for one input row.
ActResult act(const GaussianPolicy& policy, const ValueHead& value, std::span<const double> input,
              bool deterministic, Rng& rng);

struct StepOutcome {
  double reward = 0.0;
  bool done = false;
  bool success = false;
  double final_metric = 0.0;
};

class PolicyEnv {
 public:
  virtual ~PolicyEnv() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual std::vector<double> policy_input() = 0;
  virtual std::vector<double> context() { return {}; }
  virtual StepOutcome step(std::span<const double> action) = 0;
  virtual int time_step() const = 0;
};

struct RolloutRecord {
  std::vector<double> input;
  std::vector<double> context;
  std::vector<double> action;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
  std::uint64_t episode_seed = 0;
  double advantage = 0.0;
  double ret = 0.0;
};

struct RolloutBuffer {
  std::size_t num_envs = 0;
  std::size_t rollout_length = 0;
  // Contiguous per environment: record (env, t) lives at env * rollout_length + t.
  std::vector<RolloutRecord> records;
  std::vector<double> bootstrap_values;  // value of the post-rollout state, 0 if done
  std::vector<double> completed_returns;
  std::vector<bool> completed_success;

  RolloutRecord& at(std::size_t env, std::size_t t) { return records[env * rollout_length + t]; }
  const RolloutRecord& at(std::size_t env, std::size_t t) const {
    return records[env * rollout_length + t];
  }
  std::size_t size() const { return records.size(); }
};

// Half-open range training episode seeds are drawn from. Held-out
// evaluation seeds start at kEvalSeedBase.
struct SeedRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 900'000;
};
inline constexpr std::uint64_t kEvalSeedBase = 1'000'000;
inline constexpr std::uint64_t kValidationSeedBase = 900'000;

class RolloutCollector {
 public:
  RolloutCollector(std::vector<std::unique_ptr<PolicyEnv>> envs, std::uint64_t seed,
                   SeedRange seeds = {});

  RolloutBuffer collect(const GaussianPolicy& policy, const ValueHead& value,
                        std::size_t rollout_length, bool deterministic = false);

  std::size_t num_envs() const { return envs_.size(); }
  PolicyEnv& env(std::size_t i) { return *envs_[i]; }
  // Every episode seed used so far, in reset order.
  const std::vector<std::uint64_t>& episode_seeds() const { return episode_seeds_; }

 private:
  void start_episode(std::size_t i);

  std::vector<std::unique_ptr<PolicyEnv>> envs_;
  std::vector<Rng> episode_rngs_;
  std::vector<Rng> action_rngs_;
  std::vector<std::uint64_t> current_seed_;
  std::vector<double> running_return_;
  std::vector<bool> started_;
  SeedRange seeds_;
  std::vector<std::uint64_t> episode_seeds_;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t,
// A_t = delta_t + gamma lambda (1 - done_t) A_{t+1}, returns = A + V.
GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const bool> dones, double bootstrap_value, double gamma, double lambda);

// Fills advantage/ret on every record of the buffer (per-env GAE).
void compute_advantages(RolloutBuffer& buffer, double gamma, double lambda);

// In place: zero mean, unit (population) standard deviation.
void normalize_advantages(std::vector<double>& advantages);

struct LossTerms {
  tensor::Tensor total;
  tensor::Tensor policy_loss;
  tensor::Tensor value_loss;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Clipped surrogate + value MSE - entropy bonus on one minibatch.
LossTerms ppo_loss(tensor::Tape& tape, const GaussianPolicy& policy, const ValueHead& value,
                   const tensor::Tensor& inputs, const tensor::Tensor& actions,
                   std::span<const double> old_log_probs, std::span<const double> advantages,
                   std::span<const double> returns, const PPOConfig& config);

using RowBuilder = std::function<tensor::Tensor(tensor::Tape&, const RolloutBuffer&,
                                                std::span<const std::size_t>)>;

struct UpdateHooks {
  // Builds the policy/value input rows; defaults to the recorded inputs.
  RowBuilder policy_input;
  // Extra scalar loss added to the PPO loss; may be empty.
  RowBuilder auxiliary_loss;
};

struct UpdateMetrics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double auxiliary_loss = 0.0;
  double grad_norm = 0.0;
};

// Inputs of the given rows as a constant [rows, width] tensor.
tensor::Tensor gather_inputs(const RolloutBuffer& buffer, std::span<const std::size_t> rows);
tensor::Tensor gather_actions(const RolloutBuffer& buffer, std::span<const std::size_t> rows);
// Columns [offset, offset + width) of the context of the given rows.
tensor::Tensor gather_context(const RolloutBuffer& buffer, std::span<const std::size_t> rows,
                              std::size_t offset, std::size_t width);

// Computes GAE, normalises advantages, then runs epochs over shuffled
// minibatches. `params` is everything Adam updates.
UpdateMetrics ppo_update(RolloutBuffer& buffer, const GaussianPolicy& policy,
                         const ValueHead& value, const tensor::ParameterList& params,
                         tensor::AdamState& optimizer, const PPOConfig& config, Rng& rng,
                         const UpdateHooks& hooks = {});

struct EpisodeRecord {
  std::uint64_t seed = 0;
  bool success = false;
  int steps = 0;
  double episode_return = 0.0;
  double final_metric = 0.0;
};

struct EvalSummary {
  double success_rate = 0.0;
  double mean_return = 0.0;
  double mean_episode_length = 0.0;
  std::vector<EpisodeRecord> episodes;

  int successes() const;
};

// Runs one full episode per seed. A policy step hook may replace the network
// (scripted policies in tests).
using ActionFn = std::function<std::vector<double>(std::span<const double> input, Rng& rng)>;

EvalSummary evaluate_policy(PolicyEnv& env, const ActionFn& policy,
                            std::span<const std::uint64_t> seeds, int max_steps = 100000);
EvalSummary evaluate_policy(PolicyEnv& env, const GaussianPolicy& policy,
                            std::span<const std::uint64_t> seeds, bool deterministic);

// "17 (85%)"
std::string format_success(int successes, int episodes);

// Gripper-to-target task used as the PPO sanity gate: the point starts
// uniformly in [-1, 1]^2 and must come within `tolerance` of the origin.
class ReachEnv : public PolicyEnv {
 public:
  struct Options {
    double max_speed = 0.5;
    double dt = 1.0 / 3.0;
    double tolerance = 0.05;
    int horizon = 30;
  };
  ReachEnv() : ReachEnv(Options{}) {}
  explicit ReachEnv(Options options) : options_(options) {}

  static constexpr std::size_t kInputWidth = 4;
  static constexpr std::size_t kActionWidth = 2;

  void reset(std::uint64_t seed) override;
  std::vector<double> policy_input() override;
  StepOutcome step(std::span<const double> action) override;
  int time_step() const override { return t_; }
  Vec2 position() const { return pos_; }

 private:
  Options options_;
  Vec2 pos_;
  int t_ = 0;
};

}  // namespace rapida::ppo
