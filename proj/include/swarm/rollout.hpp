#pragma once

#include <cstdint>
#include <vector>

#include "swarm/comm_graph.hpp"
#include "swarm/env.hpp"
#include "swarm/policy.hpp"
#include "swarm/tasks.hpp"

namespace swarm {

struct CommConfig {
  CommMode mode = CommMode::Unrestricted;
  double radius = 2.0;
  bool dropout = false;
  double dropout_p = 0.5;
  int dropout_period = 10;
  bool dropout_in_eval = false;  // robustness evaluation only
};

// N independent environment instances with their own named rng streams:
// one episode-init stream, one action-sampling stream and one dropout
// schedule per instance, all derived from the master seed.
class EnvPool {
 public:
  EnvPool(const WorldConfig& wc, const TaskConfig& tc, const CommConfig& cc, uint64_t seed,
          int n_envs);

  int size() const { return static_cast<int>(envs_.size()); }
  Env& env(int i) { return envs_[i]; }
  const Env& env(int i) const { return envs_[i]; }
  const CommConfig& comm() const { return comm_; }

  void reset_env(int i) { envs_[i].reset(init_rng_[i]); }
  void reset_all() {
    for (int i = 0; i < size(); ++i) reset_env(i);
  }

  // Mask for the current state of env i: communication mode, then dropout
  // when training (or when dropout_in_eval is set).
  AdjacencyMask mask_for(int i, bool training);

  Rng& action_rng(int i) { return action_rng_[i]; }

  // Flat view of every stream state, for checkpointing.
  std::vector<std::array<uint64_t, 4>> rng_states() const;
  void set_rng_states(const std::vector<std::array<uint64_t, 4>>& states);

 private:
  CommConfig comm_;
  std::vector<Env> envs_;
  std::vector<Rng> init_rng_;
  std::vector<Rng> action_rng_;
  std::vector<DropoutSchedule> dropout_;
};

// Transitions of one rollout: T timesteps of N environments of M agents.
// Rewards are shared across the team, values and log-probs are per agent.
struct RolloutBuffer {
  int T = 0, N = 0, M = 0, L = 0;
  std::vector<float> own;       // T*N*M x obs_dim
  std::vector<float> rel;       // T*N*M*L x entity_dim
  std::vector<AdjacencyMask> masks;  // T*N
  std::vector<int> actions;     // T*N*M
  std::vector<float> log_probs; // T*N*M
  std::vector<float> values;    // T*N*M
  std::vector<float> rewards;   // T*N, shared scalar
  std::vector<uint8_t> dones;   // T*N
  std::vector<float> bootstrap; // N*M, value of the state after step T-1

  void allocate(int t, int n, int m, int l);

  size_t step_index(int t, int env) const { return static_cast<size_t>(t) * N + env; }
  size_t agent_index(int t, int env, int agent) const {
    return (static_cast<size_t>(t) * N + env) * M + agent;
  }
};

struct RolloutStats {
  double mean_step_reward = 0.0;
  double mean_episode_return = 0.0;
  double mean_episode_length = 0.0;
  int episodes_completed = 0;
  double success_rate = 0.0;  // completed episodes only
};

// Runs the policy for T steps in every pool env (auto-resetting finished
// episodes), sampling actions. Envs are independent, so distributing them
// over threads changes nothing in the result.
RolloutStats collect_rollout(EnvPool& pool, const PolicyNet& net, RolloutBuffer& buf, int T,
                             int threads = 1);

}  // namespace swarm
