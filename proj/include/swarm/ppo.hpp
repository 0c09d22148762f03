#pragma once

#include "swarm/nn.hpp"
#include "swarm/policy.hpp"
#include "swarm/rollout.hpp"

namespace swarm {

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_eps = 0.2;
  double value_coef = 0.5;    // c1
  double entropy_coef = 0.01; // c2
  int epochs = 4;             // K
  double lr = 1e-4;
  int n_envs = 32;
  int rollout_len = 128;
  int minibatches = 4;
  double grad_clip = 0.5;
  bool advantage_norm = true;

  void validate() const {
    if (gamma <= 0 || gamma > 1) throw std::invalid_argument("ppo: gamma in (0,1]");
    if (lambda < 0 || lambda > 1) throw std::invalid_argument("ppo: lambda in [0,1]");
    if (clip_eps <= 0) throw std::invalid_argument("ppo: clip_eps must be > 0");
    if (epochs < 1 || n_envs < 1 || rollout_len < 1 || minibatches < 1)
      throw std::invalid_argument("ppo: counts must be >= 1");
    if ((n_envs * rollout_len) % minibatches != 0)
      throw std::invalid_argument("ppo: minibatches must divide n_envs * rollout_len");
    if (grad_clip <= 0) throw std::invalid_argument("ppo: grad_clip must be > 0");
  }
};

// Advantages and returns aligned with the buffer's (t, env, agent) index
// space; returns[i] = advantages[i] + values[i].
struct GaeOutput {
  std::vector<float> advantages;
  std::vector<float> returns;
};

// Backward recursion A_t = delta_t + gamma*lambda*(1 - done_t)*A_{t+1} per
// (env, agent) stream; episode boundaries stop both the bootstrap and the
// recursion. Arithmetic in double.
GaeOutput compute_gae(const RolloutBuffer& buf, double gamma, double lambda);

// The same recursion at full 64-bit output precision (verification path;
// compute_gae casts these values to the buffer dtype).
std::vector<double> compute_gae_f64(const RolloutBuffer& buf, double gamma, double lambda);

// Shifts/scales to mean 0, population std 1 (plus 1e-8).
void normalize_advantages(std::vector<float>& adv);

struct UpdateStats {
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
};

struct IterationStats {
  RolloutStats rollout;
  UpdateStats update;
  int64_t timesteps = 0;  // env steps collected this iteration
};

// One PPO iteration: collect N*T steps, compute GAE, then K epochs of
// shuffled minibatch updates. Minibatches are (t, env) slices; the M agents
// of a timestep always stay together.
class PpoDriver {
 public:
  PpoDriver(PolicyNet& net, PpoConfig cfg, uint64_t seed);

  IterationStats train_iteration(EnvPool& pool, int threads = 1);

  // Schedule hooks: adjust loss coefficients between iterations.
  void set_coefs(double value_coef, double entropy_coef) {
    cfg_.value_coef = value_coef;
    cfg_.entropy_coef = entropy_coef;
  }

  PpoConfig& config() { return cfg_; }
  const PpoConfig& config() const { return cfg_; }
  AdamState& adam() { return adam_; }
  Rng& shuffle_rng() { return shuffle_rng_; }

 private:
  UpdateStats update(const RolloutBuffer& buf, const GaeOutput& gae);

  PolicyNet& net_;
  PpoConfig cfg_;
  AdamState adam_;
  Rng shuffle_rng_;
};

}  // namespace swarm
