#pragma once

// Two-phase rapid motor adaptation.
//
// Phase I trains the policy together with a shape encoder (mu_s) and a
// dynamics encoder (mu_d) that read privileged simulator state. Phase II
// freezes the encoders, distils them into adapters (phi_s, phi_d) that only
// see the observation-action history, and fine-tunes the policy on the
// adapted embedding. Deployment refreshes the embeddings every 5 steps.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rapida/observe.hpp"
#include "rapida/ppo.hpp"
#include "rapida/tasks.hpp"
#include "rapida/tensor.hpp"

namespace rapida::rma {

inline constexpr std::size_t kEmbeddingDim = 8;
inline constexpr std::size_t kPolicyInputWidth = observe::kObservationWidth + kEmbeddingDim;  // 77
inline constexpr std::size_t kDynamicsEncoderWidth = tasks::kDynamicsInputWidth + kEmbeddingDim;  // 27
inline constexpr std::size_t kDynamicsAdapterWidth = observe::kHistoryWidth + kEmbeddingDim;  // 728
inline constexpr int kRefreshPeriod = 5;

enum class Variant { full, no_adapt, no_shape, e2e };
enum class Phase { phase1, phase2 };

std::string to_string(Variant v);
Variant parse_variant(std::string_view name);
std::string to_string(Phase p);
Phase parse_phase(std::string_view name);
const std::vector<Variant>& all_variants();

struct NetworkConfig {
  std::vector<std::size_t> policy_hidden{64, 64};
  std::vector<std::size_t> encoder_hidden{64};
  std::vector<std::size_t> adapter_hidden{128, 64};
  double policy_output_gain = 0.01;
};

// Every network a variant can own. Absent networks are empty Mlps.
struct Networks {
  Variant variant = Variant::full;
  Phase phase = Phase::phase1;
  ppo::GaussianPolicy policy;
  ppo::ValueHead value;
  tensor::Mlp shape_encoder;     // mu_s: 190 -> 8
  tensor::Mlp dynamics_encoder;  // mu_d: 27 (19 for no_shape) -> 8
  tensor::Mlp shape_adapter;     // phi_s: 720 -> 8
  tensor::Mlp dynamics_adapter;  // phi_d: 728 (720 for no_shape) -> 8

  bool uses_shape() const { return variant != Variant::no_shape; }
  bool has_encoders() const { return !dynamics_encoder.empty(); }
  bool has_adapters() const { return !dynamics_adapter.empty(); }

  // All parameters present, named "policy.*", "value.*", "mu_s.*", ...
  tensor::ParameterList parameters() const;
  tensor::ParameterList policy_parameters() const;  // policy + value
  tensor::ParameterList encoder_parameters() const;
  tensor::ParameterList adapter_parameters() const;
  Networks clone() const;
};

// Phase-I networks for full / no_adapt / no_shape, or the single-phase e2e set.
Networks make_networks(Variant variant, const NetworkConfig& config, Rng& rng);
// Adds freshly initialised adapters to Phase-I networks and drops nothing yet.
void add_adapters(Networks& nets, const NetworkConfig& config, Rng& rng);
// Removes the encoders (done when a Phase-II result is finalised).
void drop_encoders(Networks& nets);

// Forward passes without gradient tracking.
std::vector<double> encode_shape(const Networks& nets, std::span<const double> shape_input);
std::vector<double> encode_dynamics(const Networks& nets, std::span<const double> dynamics_input,
                                    std::span<const double> z_s);
std::vector<double> adapt_shape(const Networks& nets, std::span<const double> history);
std::vector<double> adapt_dynamics(const Networks& nets, std::span<const double> history,
                                   std::span<const double> z_s_hat);

struct PolicyOutput {
  std::vector<double> action;
  double log_prob = 0.0;
  double value = 0.0;
};
PolicyOutput policy_act(const Networks& nets, std::span<const double> observation,
                        std::span<const double> z_d, bool deterministic, Rng& rng);

// How an RmaEnv produces the embedding the policy sees, and what it records
// as rollout context.
enum class RolloutMode {
  teacher,      // z_d = mu_d(priv, mu_s(priv history)) every step; context [shape 190 | dyn 19]
  distill,      // adapters at the refresh cadence; context [history 720 | shape 190 | dyn 19]
  end_to_end,   // adapters at the refresh cadence; context [history at last refresh 720]
  deploy,       // adapters (or zeros for no_adapt) at the refresh cadence; no privileged access
};

struct DeployOptions {
  // When false the first refresh waits until the history is full.
  bool refresh_at_start = true;
};

// Recomputes adapted embeddings at t = 0 (mod 5) from the history buffer
// and holds them constant in between.
class EmbeddingSchedule {
 public:
  explicit EmbeddingSchedule(DeployOptions options = {}) : options_(options) { reset(); }
  void reset();
  // Returns true when a refresh happened at this step.
  bool update(const Networks& nets, std::int64_t time_step, const observe::HistoryBuffer& history);

  const std::vector<double>& z_s() const { return z_s_; }
  const std::vector<double>& z_d() const { return z_d_; }
  const std::vector<double>& refresh_history() const { return refresh_history_; }
  int refresh_count() const { return refreshes_; }

 private:
  DeployOptions options_;
  std::vector<double> z_s_;
  std::vector<double> z_d_;
  std::vector<double> refresh_history_;
  int refreshes_ = 0;
};

// PolicyEnv adapter binding a TaskEnv to the networks of one variant.
class RmaEnv : public ppo::PolicyEnv {
 public:
  RmaEnv(tasks::TaskSpec task, tasks::RandomizationRanges ranges, const Networks* nets,
         RolloutMode mode, DeployOptions options = {});

  void reset(std::uint64_t seed) override;
  std::vector<double> policy_input() override;
  std::vector<double> context() override;
  ppo::StepOutcome step(std::span<const double> action) override;
  int time_step() const override { return static_cast<int>(env_.time_step()); }

  RolloutMode mode() const { return mode_; }
  tasks::TaskEnv& task_env() { return env_; }
  const observe::HistoryBuffer& history() const { return history_; }
  const EmbeddingSchedule& schedule() const { return schedule_; }
  const std::vector<double>& embedding() const { return z_d_; }
  void set_networks(const Networks* nets) { nets_ = nets; }

 private:
  void prepare();

  tasks::TaskEnv env_;
  const Networks* nets_;
  RolloutMode mode_;
  observe::HistoryBuffer history_;
  EmbeddingSchedule schedule_;
  std::array<double, observe::kActionWidth> last_action_{};
  std::vector<double> z_d_;
  bool prepared_ = false;
};

// Context layouts.
inline constexpr std::size_t kTeacherShapeOffset = 0;
inline constexpr std::size_t kTeacherDynamicsOffset = tasks::kShapeInputWidth;
inline constexpr std::size_t kDistillHistoryOffset = 0;
inline constexpr std::size_t kDistillShapeOffset = observe::kHistoryWidth;
inline constexpr std::size_t kDistillDynamicsOffset = observe::kHistoryWidth + tasks::kShapeInputWidth;

struct TrainConfig {
  ppo::PPOConfig ppo;
  NetworkConfig nets;
  DeployOptions deploy;
  int phase1_updates = 3000;
  int phase2_updates = 1500;
  int eval_every = 50;
  int eval_episodes = 20;  // validation episodes per periodic evaluation
  double shape_loss_weight = 1.0;
  double dynamics_loss_weight = 1.0;
  bool reset_value_head = false;  // Phase II: continue the value head by default
  int grad_check_every = 50;
  int checkpoint_every = 500;  // periodic snapshots; 0 disables
  std::uint64_t seed = 0;

  void validate() const;
};

struct MetricsRow {
  int update_index = 0;
  ppo::UpdateMetrics ppo;
  double mean_return = 0.0;
  bool has_return = false;
  double success_rate_eval = 0.0;
  bool has_eval = false;
  Phase phase = Phase::phase1;
  double shape_l1 = 0.0;
  double dynamics_l1 = 0.0;
  bool has_l1 = false;
};

struct TrainResult {
  Networks final_nets;
  Networks best_nets;
  double best_eval = -1.0;
  tensor::AdamState optimizer;
  Rng rng{0};
  std::vector<MetricsRow> metrics;
  bool improved = false;  // false flags a run whose evaluations never rose above the first
  std::vector<std::uint64_t> episode_seeds;  // every training episode seed, in reset order
};

using MetricsCallback = std::function<void(const MetricsRow&)>;
// Called every checkpoint_every updates with the live training state.
using SnapshotCallback = std::function<void(int update, const Networks&, const tensor::AdamState&,
                                            const Rng&)>;

// Phase I for full / no_adapt / no_shape (encoders + policy end-to-end), or
// the whole e2e run (adapters + policy end-to-end).
TrainResult train_phase1(const tasks::TaskSpec& task, const tasks::RandomizationRanges& ranges,
                         Variant variant, const TrainConfig& config,
                         const MetricsCallback& on_update = {},
                         const SnapshotCallback& on_snapshot = {});

// Phase II from Phase-I networks of a full or no_shape run.
TrainResult train_phase2(const Networks& phase1, const tasks::TaskSpec& task,
                         const tasks::RandomizationRanges& ranges, const TrainConfig& config,
                         const MetricsCallback& on_update = {},
                         const SnapshotCallback& on_snapshot = {});

// Runs the variant's complete pipeline. no_adapt stops after Phase I.
struct VariantResult {
  Networks deployable;
  TrainResult phase1;
  std::optional<TrainResult> phase2;
};
VariantResult build_variant(Variant variant, const tasks::TaskSpec& task,
                            const tasks::RandomizationRanges& ranges, const TrainConfig& config,
                            const MetricsCallback& on_update = {},
                            const TrainResult* reuse_phase1 = nullptr);

struct GradientStopReport {
  double dynamics_loss_to_shape_adapter = 0.0;  // max |dL_d / d phi_s|
  double ppo_to_shape_adapter = 0.0;            // max |dL_PPO / d phi_s|
  double ppo_to_dynamics_adapter = 0.0;         // max |dL_PPO / d phi_d|
  double shape_loss_to_shape_adapter = 0.0;     // should be nonzero: path is live
  double dynamics_loss_to_dynamics_adapter = 0.0;
  bool ok() const {
    return dynamics_loss_to_shape_adapter == 0.0 && ppo_to_shape_adapter == 0.0 &&
           ppo_to_dynamics_adapter == 0.0;
  }
};

// Phase-II loss terms on one minibatch of a distill rollout.
struct DistillLosses {
  tensor::Tensor shape_l1;     // undefined for no_shape
  tensor::Tensor dynamics_l1;
};
DistillLosses distill_losses(tensor::Tape& tape, const Networks& nets,
                             const ppo::RolloutBuffer& buffer, std::span<const std::size_t> rows);

// Evaluates each loss separately and measures the gradients reaching the adapters.
GradientStopReport check_gradient_stops(const Networks& nets, ppo::RolloutBuffer& buffer,
                                        std::span<const std::size_t> rows,
                                        const ppo::PPOConfig& config);

// Policy input rows rebuilt with gradients through the encoders (teacher) or
// the adapters (end_to_end).
tensor::Tensor teacher_inputs(tensor::Tape& tape, const Networks& nets,
                              const ppo::RolloutBuffer& buffer, std::span<const std::size_t> rows);
tensor::Tensor end_to_end_inputs(tensor::Tape& tape, const Networks& nets,
                                 const ppo::RolloutBuffer& buffer,
                                 std::span<const std::size_t> rows);

// Fits an adapter to one (history, target) pair with Adam under an
// exponentially decaying step size; stops once L1 < tolerance.
struct OverfitResult {
  int steps = 0;
  double final_loss = 0.0;
  bool converged = false;
};
OverfitResult overfit_adapter(tensor::Mlp& adapter, std::span<const double> input,
                              std::span<const double> target, int max_steps = 2000,
                              double tolerance = 1e-4, double learning_rate = 1e-3,
                              double final_lr_ratio = 1e-4);

struct DeployStep {
  std::int64_t t = 0;
  std::array<double, observe::kObservationWidth> observation{};
  std::array<double, observe::kActionWidth> action{};
  std::vector<double> z_s;
  std::vector<double> z_d;
  bool refreshed = false;
};

struct Trajectory {
  std::vector<DeployStep> steps;
  bool success = false;
  int steps_taken = 0;
  double episode_return = 0.0;
  double final_metric = 0.0;
};

// Test-time loop on a deploy-mode environment. The env must already be reset.
Trajectory deploy(const Networks& nets, tasks::TaskEnv& env, int max_steps,
                  DeployOptions options = {});

// Deploy-mode evaluation over the given seeds; actions are the policy mean
// unless `deterministic` is false.
ppo::EvalSummary evaluate_variant(const Networks& nets, const tasks::TaskSpec& task,
                                  const tasks::RandomizationRanges& ranges,
                                  std::span<const std::uint64_t> seeds, DeployOptions options = {},
                                  bool deterministic = true);

// Teacher-mode (privileged) evaluation, used for Phase-I model selection.
ppo::EvalSummary evaluate_teacher(const Networks& nets, const tasks::TaskSpec& task,
                                  const tasks::RandomizationRanges& ranges,
                                  std::span<const std::uint64_t> seeds);

struct DistillationReport {
  std::size_t samples = 0;
  std::vector<double> mae;     // per dimension, |z_d_hat - z_d|
  std::vector<double> stddev;  // per dimension, std of z_d
  bool passes(double ratio = 0.25) const;
};

// Rolls out the Phase-I teacher policy on held-out seeds and compares the
// adapter's z_d estimate with the encoder's z_d at every step.
DistillationReport distillation_report(const Networks& phase1, const Networks& phase2,
                                       const tasks::TaskSpec& task,
                                       const tasks::RandomizationRanges& ranges,
                                       std::span<const std::uint64_t> seeds);

struct ProbeReport {
  std::vector<double> log_stiffness;             // grid
  std::vector<std::vector<double>> embeddings;   // [grid][dim]
  std::vector<double> pearson;                   // per dimension
  std::vector<bool> degenerate;                  // per dimension
  double max_abs_r() const;
};

double pearson(std::span<const double> x, std::span<const double> y, bool* degenerate = nullptr);

// Log-spaced stretch stiffness grid over the randomisation range.
std::vector<double> stiffness_grid(std::size_t points, double lo = 1.0, double hi = 500.0);

// Scripted grasp-and-lift on each stiffness; records z_d after the second refresh.
ProbeReport embedding_probe(const Networks& nets, const tasks::TaskSpec& task,
                            std::span<const double> stiffnesses, DeployOptions options = {});

}  // namespace rapida::rma
