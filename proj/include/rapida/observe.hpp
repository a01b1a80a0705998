#pragma once

// Non-privileged sensing: a 64-ray depth fan, gripper proprioception, the
// 3-channel action, and the rolling observation-action history.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rapida/common.hpp"
#include "rapida/physics.hpp"

namespace rapida::observe {

inline constexpr std::size_t kDepthRays = 64;
inline constexpr std::size_t kProprioWidth = 5;
inline constexpr std::size_t kObservationWidth = kDepthRays + kProprioWidth;  // 69
inline constexpr std::size_t kActionWidth = 3;
inline constexpr std::size_t kHistoryLength = 10;
inline constexpr std::size_t kHistoryEntryWidth = kObservationWidth + kActionWidth;  // 72
inline constexpr std::size_t kHistoryWidth = kHistoryLength * kHistoryEntryWidth;    // 720
inline constexpr double kDefaultMaxSpeed = 0.5;  // m/s

struct CameraSpec {
  Vec2 origin{0.0, 1.0};
  double fan_center_angle = -1.5707963267948966;  // looking down
  double fan_half_angle = 1.0;
  double max_range = 2.0;
  double noise_stddev = 0.0;  // additive Gaussian range noise, off by default

  void validate() const;
  // Ray i points at fan_center_angle + (i - 32) * (2 * fan_half_angle / 64),
  // so ray 32 is the central ray.
  double ray_angle(std::size_t i) const;
};

struct DepthScan {
  std::array<double, kDepthRays> distances{};
  CameraSpec camera;
};

struct Proprio {
  Vec2 gripper_position;
  Vec2 gripper_velocity;
  double grasping = 0.0;
};

struct Observation {
  DepthScan depth;
  Proprio proprio;

  // Network input: depth / max_range (64), gripper position (2), velocity (2), grasping (1).
  std::array<double, kObservationWidth> features() const;
};

struct Action {
  double dx = 0.0;
  double dy = 0.0;
  double grasp_logit = 0.0;

  // Velocities clamped to [-max_speed, max_speed]; the grasp logit to [-1, 1]
  // (its sign, which is all physics reads, is preserved). Non-finite input
  // is a contract violation.
  Action clamped(double max_speed = kDefaultMaxSpeed) const;
  std::array<double, kActionWidth> as_array() const { return {dx, dy, grasp_logit}; }
  physics::GripperCommand command() const { return {dx, dy, grasp_logit > 0.0}; }
};

// Distance along a ray to a segment, or +inf. Both faces block.
double ray_segment_distance(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b);
// Distance along a ray to the first crossing of a disc boundary, or +inf.
double ray_disc_distance(Vec2 origin, Vec2 dir, Vec2 center, double radius);

DepthScan render_depth(const physics::WorldState& world, const CameraSpec& camera,
                       Rng* noise = nullptr);

Observation observe(const physics::WorldState& world, const CameraSpec& camera,
                    Rng* noise = nullptr);

// Ring of the 10 most recent (observation, action) pairs. Reads are oldest
// first; slots that have never been written read as zeros and come first.
class HistoryBuffer {
 public:
  void push(const Observation& obs, const Action& act);
  void push_features(std::span<const double> entry);  // one 72-wide entry
  void clear();

  std::size_t fill_count() const { return fill_; }
  static constexpr std::size_t capacity() { return kHistoryLength; }

  // Entry i in chronological order (0 = oldest slot, zero-padded).
  std::array<double, kHistoryEntryWidth> entry(std::size_t i) const;
  std::vector<double> flatten() const;  // kHistoryWidth values

 private:
  std::array<std::array<double, kHistoryEntryWidth>, kHistoryLength> slots_{};
  std::size_t next_ = 0;
  std::size_t fill_ = 0;
};

}  // namespace rapida::observe
