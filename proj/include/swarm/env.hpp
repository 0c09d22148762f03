#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "swarm/rng.hpp"

namespace swarm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

enum class TaskKind { Coverage, Formation, Line };

struct TaskConfig {
  TaskKind kind = TaskKind::Coverage;
  double cover_threshold = 0.1;
  double formation_radius = 0.5;
  double radial_tolerance = 0.05;
  double angular_tolerance = 0.1;  // radians
  double distance_clip = 1.0;

  void validate() const {
    if (cover_threshold <= 0 || formation_radius <= 0 || radial_tolerance <= 0 ||
        angular_tolerance <= 0 || distance_clip <= 0)
      throw std::invalid_argument("task config: thresholds must be positive");
  }
};

// Landmark count is fixed by the task.
inline int landmarks_for(TaskKind kind, int num_agents) {
  switch (kind) {
    case TaskKind::Coverage: return num_agents;
    case TaskKind::Formation: return 1;
    case TaskKind::Line: return 2;
  }
  return num_agents;
}

struct WorldConfig {
  double arena_half_width = 2.0;  // arena is the square [-w, w]^2
  double dt = 0.1;
  double damping = 0.5;
  // Force sensitivity of the particle simulator: the decoded unit
  // acceleration is scaled by this before integration (the multi-agent
  // particle environment's default actuator gain). At 1.0 the terminal
  // speed dt/(1-damping) is far too low to cross the arena within the
  // horizon.
  double accel_scale = 5.0;
  int horizon = 50;
  int num_agents = 3;
  int num_landmarks = 3;

  void validate() const {
    if (dt <= 0) throw std::invalid_argument("world config: dt must be > 0");
    if (accel_scale <= 0) throw std::invalid_argument("world config: accel_scale must be > 0");
    if (damping < 0 || damping >= 1) throw std::invalid_argument("world config: damping in [0,1)");
    if (horizon < 1) throw std::invalid_argument("world config: horizon must be >= 1");
    if (num_agents < 1 || num_landmarks < 1)
      throw std::invalid_argument("world config: need at least one agent and landmark");
    if (arena_half_width <= 0) throw std::invalid_argument("world config: arena size must be > 0");
  }
};

// Discrete acceleration actions: no-op, +x, -x, +y, -y.
constexpr int kNumActions = 5;

inline Vec2 decode_action(int a) {
  switch (a) {
    case 0: return {0.0, 0.0};
    case 1: return {1.0, 0.0};
    case 2: return {-1.0, 0.0};
    case 3: return {0.0, 1.0};
    case 4: return {0.0, -1.0};
    default: throw std::invalid_argument("action index out of range");
  }
}

struct EnvState {
  std::vector<Vec2> pos;
  std::vector<Vec2> vel;
  std::vector<Vec2> landmarks;
  int step = 0;
  bool done = false;
  bool success = false;
};

// Per-agent observation: own position+velocity plus each landmark's position
// relative to the agent. No other agent's state appears.
struct Observation {
  std::array<double, 4> own;  // px, py, vx, vy
  std::vector<Vec2> rel;      // landmark - agent, in landmark storage order
};

constexpr int kObsDim = 4;
constexpr int kEntityDim = 2;

// Deterministic 2-D particle world with double-integrator dynamics. Agents
// are free particles (no collision forces, no walls); only initialization is
// confined to the arena.
class Env {
 public:
  Env(WorldConfig wc, TaskConfig tc);

  // Uniform i.i.d. positions over the arena, zero velocities. The formation
  // landmark is confined to the central half so the target circle fits.
  void reset(Rng& rng);

  // Semi-implicit update: velocity first, then position with the new
  // velocity. Returns the shared team reward of the post-step state.
  // Throws on a finished episode.
  double step(const std::vector<int>& actions);

  std::vector<Observation> observe() const;

  const EnvState& state() const { return state_; }
  EnvState& mutable_state() { return state_; }
  const WorldConfig& world() const { return world_; }
  const TaskConfig& task() const { return task_; }

 private:
  WorldConfig world_;
  TaskConfig task_;
  EnvState state_;
};

}  // namespace swarm
