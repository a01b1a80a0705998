#pragma once

// 2D mass-spring deformable bodies over static segment geometry, driven by a
// kinematic point gripper that can pin one particle.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rapida/common.hpp"

namespace rapida::physics {

struct PhysicsParams {
  double stretch_stiffness = 50.0;  // N/m
  double shear_stiffness = 25.0;    // N/m
  double bend_stiffness = 1.0;      // N/m
  double damping_coeff = 0.2;       // N*s/m, axial
  double particle_mass = 0.05;      // kg
  double friction_coeff = 0.6;
  double gravity = 9.8;             // m/s^2, along -y
  int substeps = 8;
  double dt_control = 1.0 / 3.0;    // s
  double particle_radius = 0.0;     // m, contact offset from surfaces

  // Throws ContractViolation naming the first violated invariant.
  void validate() const;
};

enum class SpringKind : std::uint8_t { stretch, shear, bend };

struct Spring {
  std::size_t a = 0;
  std::size_t b = 0;
  double rest_length = 0.0;
  SpringKind kind = SpringKind::stretch;
};

struct DeformableTopology {
  std::size_t rows = 1;
  std::size_t cols = 2;
  std::vector<Spring> springs;

  std::size_t particle_count() const { return rows * cols; }
  std::size_t index(std::size_t r, std::size_t c) const { return r * cols + c; }
};

struct ParticleSystem {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  std::vector<double> masses;
  DeformableTopology topology;

  std::size_t size() const { return positions.size(); }
};

// One-sided wall: the solid lies to the right of a->b, so the left normal
// points into free space. Particles less than `thickness` behind the
// surface count as penetrating.
struct Segment {
  Vec2 a;
  Vec2 b;
  double thickness = 0.05;

  Vec2 direction() const;
  Vec2 normal() const;
  double length() const { return (b - a).norm(); }
};

struct OpeningSpan {
  double x_left = 0.0;
  double x_right = 1.0;
  double y_level = 0.0;
};

struct StaticGeometry {
  std::vector<Segment> segments;
  std::vector<Vec2> container_interior;  // convex polygon, counter-clockwise
  OpeningSpan opening;
  Vec2 workspace_min{-10.0, -10.0};
  Vec2 workspace_max{10.0, 10.0};

  void validate() const;
};

struct Gripper {
  Vec2 position;
  Vec2 velocity;
  bool grasping = false;
  std::optional<std::size_t> attached_particle;
  double attach_radius = 0.06;
  double radius = 0.04;  // visual disc radius for the depth scan
};

struct WorldState {
  ParticleSystem particles;
  StaticGeometry geometry;
  Gripper gripper;
  PhysicsParams params;
  std::int64_t time_step = 0;
};

// Physics-level command; dx, dy are already clamped velocities.
struct GripperCommand {
  double vx = 0.0;
  double vy = 0.0;
  bool grasp = false;
};

struct PrivilegedState {
  std::vector<Vec2> particle_positions;
  std::vector<Vec2> particle_deltas;
  double total_mass = 0.0;
  Vec2 centroid;
};

class SimulationDiverged : public NumericalError {
 public:
  explicit SimulationDiverged(std::int64_t step)
      : NumericalError("simulation diverged at time_step " + std::to_string(step)), step_(step) {}
  std::int64_t time_step() const { return step_; }

 private:
  std::int64_t step_;
};

struct TopologySpec {
  std::size_t rows = 1;
  std::size_t cols = 2;
  double spacing = 0.05;
};

struct Pose {
  Vec2 origin;
  double angle = 0.0;
};

DeformableTopology make_topology(std::size_t rows, std::size_t cols, double spacing);

ParticleSystem build_deformable(const TopologySpec& spec, const PhysicsParams& params,
                                const Pose& pose);

double stiffness_for(const PhysicsParams& params, SpringKind kind);

// Internal spring + axial damping forces, one per particle. Springs whose
// endpoints coincide are skipped and counted in `degenerate`.
std::vector<Vec2> spring_forces(const ParticleSystem& system, const PhysicsParams& params,
                                std::size_t* degenerate = nullptr);

// Spring potential energy sum_k 1/2 k (|d| - rest)^2.
double spring_potential(const ParticleSystem& system, const PhysicsParams& params);
double kinetic_energy(const ParticleSystem& system);
Vec2 linear_momentum(const ParticleSystem& system);

// Projects penetrating particles back to the surface, removing the incoming
// normal velocity and damping the tangential velocity. `previous` (optional)
// holds positions before the last integration so particles that crossed a
// wall entirely are caught. `pinned` is skipped.
ParticleSystem resolve_collisions(const ParticleSystem& system, const StaticGeometry& geometry,
                                  double friction, double particle_radius = 0.0,
                                  std::span<const Vec2> previous = {},
                                  std::optional<std::size_t> pinned = std::nullopt);

// One control step. Throws SimulationDiverged if the state becomes non-finite.
WorldState step(const WorldState& world, const GripperCommand& command);
// In-place variant used by the environments.
void step_in_place(WorldState& world, const GripperCommand& command);

PrivilegedState privileged_state(const WorldState& world, std::span<const Vec2> prev_positions);

// Smallest substep count that keeps semi-implicit Euler stable for this
// topology and parameter set (never below `minimum`).
int stable_substeps(const DeformableTopology& topology, const PhysicsParams& params,
                    int minimum = 8);

}  // namespace rapida::physics
