#include "swarm/env.hpp"

#include "swarm/tasks.hpp"

namespace swarm {

Env::Env(WorldConfig wc, TaskConfig tc) : world_(wc), task_(tc) {
  world_.validate();
  task_.validate();
  if (world_.num_landmarks != landmarks_for(task_.kind, world_.num_agents))
    throw std::invalid_argument("env: landmark count does not match the task");
}

void Env::reset(Rng& rng) {
  const double w = world_.arena_half_width;
  state_.pos.assign(world_.num_agents, {});
  state_.vel.assign(world_.num_agents, {});
  state_.landmarks.assign(world_.num_landmarks, {});
  for (auto& p : state_.pos) {
    p.x = rng.uniform(-w, w);
    p.y = rng.uniform(-w, w);
  }
  // Formation: the landmark stays in the central half so the target circle
  // fits inside the arena.
  const double lw = task_.kind == TaskKind::Formation ? w / 2.0 : w;
  for (auto& p : state_.landmarks) {
    p.x = rng.uniform(-lw, lw);
    p.y = rng.uniform(-lw, lw);
  }
  state_.step = 0;
  state_.done = false;
  state_.success = false;
}

double Env::step(const std::vector<int>& actions) {
  if (state_.done) throw std::logic_error("env: step on a finished episode");
  if (static_cast<int>(actions.size()) != world_.num_agents)
    throw std::invalid_argument("env: need one action per agent");
  const double dt = world_.dt;
  const double damping = world_.damping;
  const double gain = world_.accel_scale;
  for (int i = 0; i < world_.num_agents; ++i) {
    const Vec2 a = decode_action(actions[i]);
    auto& v = state_.vel[i];
    v.x = damping * v.x + gain * a.x * dt;
    v.y = damping * v.y + gain * a.y * dt;
    auto& p = state_.pos[i];
    p.x += v.x * dt;
    p.y += v.y * dt;
  }
  state_.step += 1;
  const double reward = task_reward(state_, task_);
  state_.success = task_success(state_, task_);
  state_.done = state_.success || state_.step >= world_.horizon;
  return reward;
}

std::vector<Observation> Env::observe() const {
  std::vector<Observation> out(world_.num_agents);
  for (int i = 0; i < world_.num_agents; ++i) {
    auto& o = out[i];
    o.own = {state_.pos[i].x, state_.pos[i].y, state_.vel[i].x, state_.vel[i].y};
    o.rel.resize(world_.num_landmarks);
    for (int l = 0; l < world_.num_landmarks; ++l) {
      o.rel[l].x = state_.landmarks[l].x - state_.pos[i].x;
      o.rel[l].y = state_.landmarks[l].y - state_.pos[i].y;
    }
  }
  return out;
}

}  // namespace swarm
