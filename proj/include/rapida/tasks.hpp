#pragma once

// The two desk-scale tasks: `insert` (carry one end of a chain into a
// container) and `cover` (lay a strip across the container opening).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rapida/observe.hpp"
#include "rapida/physics.hpp"

namespace rapida::tasks {

enum class TaskKind { insert, cover };

std::string to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

struct Scene {
  physics::StaticGeometry geometry;
  observe::CameraSpec camera;
  // Objects are laid flat with particle centres at object_y and the first
  // particle's x drawn from [object_x_min, object_x_max - length].
  double object_x_min = 0.0;
  double object_x_max = 1.0;
  double object_y = 0.0;
  Vec2 gripper_min;
  Vec2 gripper_max;
  double spacing = 0.03;
  double particle_radius = 0.0;
  double attach_radius = 0.06;
};

// Key-value scene description; see scenes/*.scene. Errors carry line numbers.
Scene parse_scene(std::string_view text, const std::string& source = "<scene>");
Scene load_scene(const std::string& path);
std::string_view builtin_scene_text(TaskKind kind);
Scene builtin_scene(TaskKind kind);

struct TaskSpec {
  TaskKind kind = TaskKind::insert;
  Scene scene;
  double coverage_threshold = 0.9;
  int success_hold_steps = 5;
  int horizon = 200;
  double shaping_coeff = 0.01;
  double band_height = 0.05;
  int settle_steps = 20;
  double max_speed = observe::kDefaultMaxSpeed;

  void validate() const;
};

TaskSpec default_task(TaskKind kind);

struct RandomizationRanges {
  double stretch_min = 1.0, stretch_max = 500.0;  // log-uniform
  double bend_min = 0.01, bend_max = 50.0;        // log-uniform
  double damping_min = 0.05, damping_max = 0.5;
  double mass_min = 0.02, mass_max = 0.2;
  int insert_cols_min = 8, insert_cols_max = 24;
  int cover_rows_min = 1, cover_rows_max = 2;
  int cover_cols_min = 8, cover_cols_max = 16;
  double shear_ratio = 0.5;  // shear stiffness = ratio * stretch stiffness
  double friction = 0.6;

  void validate() const;
};

// Everything drawn from the initial-state distribution for one seed.
struct EpisodeDraw {
  physics::PhysicsParams params;
  physics::TopologySpec topology;
  physics::Pose pose;
  Vec2 gripper_start;
};

EpisodeDraw sample_episode(const TaskSpec& task, const RandomizationRanges& ranges,
                           std::uint64_t seed);
// Builds the world for a draw and lets it settle (time_step is reset to 0).
physics::WorldState make_world(const TaskSpec& task, const EpisodeDraw& draw);
physics::WorldState reset(const TaskSpec& task, const RandomizationRanges& ranges,
                          std::uint64_t seed);

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& polygon);
Vec2 polygon_centroid(const std::vector<Vec2>& polygon);

// Either chain end strictly inside the container interior.
bool endpoint_inside(const physics::WorldState& world);
// Fraction of the opening covered by x-projections of stretch/shear edges
// whose endpoints both lie in [y_level, y_level + band_height].
double coverage(const physics::WorldState& world, double band_height = 0.05);
// Distance used by the shaping term.
double task_distance(const physics::WorldState& world, TaskKind kind);
double reward(const physics::WorldState& world, const TaskSpec& task, bool success_now);

enum class EnvMode { training, deploy };

inline constexpr std::size_t kTrackedParticles = 8;
inline constexpr std::size_t kShapeInputWidth =
    observe::kHistoryLength * (kTrackedParticles * 2) +
    observe::kHistoryLength * observe::kActionWidth;  // 190
inline constexpr std::size_t kDynamicsInputWidth = 1 + 2 + kTrackedParticles * 2;  // 19

std::array<std::size_t, kTrackedParticles> tracked_indices(std::size_t particle_count);

struct PrivilegedInfo {
  physics::PrivilegedState state;
  // Tracked positions (centred on the current centroid) over the last 10
  // steps, oldest first, then the matching 10 actions; zero-padded.
  std::vector<double> shape_input;
  // Total mass, centroid, tracked-particle deltas.
  std::vector<double> dynamics_input;
  physics::PhysicsParams params;
};

struct StepInfo {
  double coverage = 0.0;
  bool inside = false;
  int hold_count = 0;

  bool has_privileged() const { return privileged_.has_value(); }
  // Throws ContractViolation when the env runs in deploy mode.
  const PrivilegedInfo& privileged() const;

  std::optional<PrivilegedInfo> privileged_;
};

struct EnvStep {
  observe::Observation observation;
  double reward = 0.0;
  bool done = false;
  bool success = false;
  StepInfo info;
};

struct EpisodeOutcome {
  bool success = false;
  int steps_taken = 0;
  double final_metric = 0.0;  // coverage (cover) or inside flag (insert)
  double episode_return = 0.0;
};

class TaskEnv {
 public:
  TaskEnv(TaskSpec task, RandomizationRanges ranges, EnvMode mode);

  const observe::Observation& reset(std::uint64_t seed);
  // Resets from an explicit draw (probes, tests).
  const observe::Observation& reset_with(const EpisodeDraw& draw, std::uint64_t seed = 0);
  EnvStep step(const observe::Action& action);

  const observe::Observation& observation() const { return observation_; }
  bool done() const { return done_; }
  std::int64_t time_step() const { return world_.time_step; }
  EnvMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  const TaskSpec& task() const { return task_; }
  const EpisodeOutcome& outcome() const { return outcome_; }

  // Privileged accessors: fatal in deploy mode.
  const PrivilegedInfo& privileged() const;
  const physics::WorldState& world() const;
  std::size_t privileged_reads() const { return privileged_reads_; }

  // Test hook: bypasses the deploy-mode firewall.
  physics::WorldState& world_for_testing() { return world_; }

 private:
  void refresh_privileged(const std::vector<Vec2>& prev_positions, const observe::Action& act);
  bool success_predicate() const;

  TaskSpec task_;
  RandomizationRanges ranges_;
  EnvMode mode_;
  physics::WorldState world_;
  observe::Observation observation_;
  std::uint64_t seed_ = 0;
  bool done_ = true;
  int hold_count_ = 0;
  EpisodeOutcome outcome_;
  std::array<std::size_t, kTrackedParticles> tracked_{};
  // Tracked positions and actions, ring ordered like HistoryBuffer.
  std::vector<std::array<Vec2, kTrackedParticles>> position_ring_;
  std::vector<observe::Action> action_ring_;
  std::size_t ring_fill_ = 0;
  std::optional<PrivilegedInfo> privileged_;
  mutable std::size_t privileged_reads_ = 0;
};

}  // namespace rapida::tasks
