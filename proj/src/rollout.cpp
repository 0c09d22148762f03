#include "swarm/rollout.hpp"

#include <thread>

namespace swarm {

EnvPool::EnvPool(const WorldConfig& wc, const TaskConfig& tc, const CommConfig& cc, uint64_t seed,
                 int n_envs)
    : comm_(cc) {
  if (n_envs < 1) throw std::invalid_argument("env pool: need at least one env");
  envs_.reserve(n_envs);
  for (int i = 0; i < n_envs; ++i) {
    envs_.emplace_back(wc, tc);
    init_rng_.push_back(Rng(derive_seed(derive_seed(seed, stream::kEnvInit), i)));
    action_rng_.push_back(Rng(derive_seed(derive_seed(seed, stream::kAction), i)));
    dropout_.emplace_back(cc.dropout_p, cc.dropout_period,
                          Rng(derive_seed(derive_seed(seed, stream::kDropout), i)));
  }
  reset_all();
}

AdjacencyMask EnvPool::mask_for(int i, bool training) {
  auto mask = build_adjacency(envs_[i].state().pos, comm_.mode, comm_.radius);
  const bool want_drop = comm_.dropout && (training || comm_.dropout_in_eval);
  if (want_drop) mask = dropout_[i].apply(mask, envs_[i].state().step);
  return mask;
}

std::vector<std::array<uint64_t, 4>> EnvPool::rng_states() const {
  std::vector<std::array<uint64_t, 4>> out;
  for (const auto& r : init_rng_) out.push_back(r.state());
  for (const auto& r : action_rng_) out.push_back(r.state());
  for (const auto& d : dropout_) out.push_back(d.rng().state());
  return out;
}

void EnvPool::set_rng_states(const std::vector<std::array<uint64_t, 4>>& states) {
  const size_t n = envs_.size();
  if (states.size() != 3 * n) throw std::invalid_argument("env pool: rng state count mismatch");
  for (size_t i = 0; i < n; ++i) init_rng_[i].set_state(states[i]);
  for (size_t i = 0; i < n; ++i) action_rng_[i].set_state(states[n + i]);
  for (size_t i = 0; i < n; ++i) dropout_[i].rng().set_state(states[2 * n + i]);
}

void RolloutBuffer::allocate(int t, int n, int m, int l) {
  T = t;
  N = n;
  M = m;
  L = l;
  const size_t steps = static_cast<size_t>(t) * n;
  const size_t rows = steps * m;
  own.assign(rows * kObsDim, 0.f);
  rel.assign(rows * static_cast<size_t>(l) * kEntityDim, 0.f);
  masks.assign(steps, AdjacencyMask(m));
  actions.assign(rows, 0);
  log_probs.assign(rows, 0.f);
  values.assign(rows, 0.f);
  rewards.assign(steps, 0.f);
  dones.assign(steps, 0);
  bootstrap.assign(static_cast<size_t>(n) * m, 0.f);
}

namespace {

struct EnvAccum {
  double reward_sum = 0.0;
  double episode_return_sum = 0.0;
  double episode_len_sum = 0.0;
  int episodes = 0;
  int successes = 0;
};

// Steps a contiguous group of envs in lockstep, batching each timestep's
// policy forward into one tape of (group * M) rows. Every row-level
// computation is block-local, so the results are bit-identical to stepping
// envs one at a time.
void run_group(EnvPool& pool, const PolicyNet& net, RolloutBuffer& buf, int T, int e0, int e1,
               std::vector<EnvAccum>& acc, std::vector<double>& running) {
  const int M = buf.M, L = buf.L;
  const int G = e1 - e0;
  TensorT<float> own = TensorT<float>::zeros({G * M, kObsDim});
  TensorT<float> rel = TensorT<float>::zeros({G * M * L, kEntityDim});
  std::vector<AdjacencyMask> blocks(G);
  std::vector<std::vector<Observation>> group_obs(G);

  auto gather = [&](int t) {
    for (int g = 0; g < G; ++g) {
      const int e = e0 + g;
      group_obs[g] = pool.env(e).observe();
      blocks[g] = pool.mask_for(e, true);
      if (t >= 0) buf.masks[buf.step_index(t, e)] = blocks[g];
      for (int i = 0; i < M; ++i) {
        const size_t row = static_cast<size_t>(g) * M + i;
        for (int d = 0; d < kObsDim; ++d)
          own.data[row * kObsDim + d] = static_cast<float>(group_obs[g][i].own[d]);
        for (int l = 0; l < L; ++l) {
          rel.data[(row * L + l) * kEntityDim + 0] = static_cast<float>(group_obs[g][i].rel[l].x);
          rel.data[(row * L + l) * kEntityDim + 1] = static_cast<float>(group_obs[g][i].rel[l].y);
        }
      }
    }
  };

  std::vector<int> acts(M);
  for (int t = 0; t < T; ++t) {
    gather(t);
    Tape tape;
    const auto outs = net.forward_tape(tape, own, rel, L, blocks);
    const auto& logits = tape.val(outs.logits);
    const auto& values = tape.val(outs.values);
    for (int g = 0; g < G; ++g) {
      const int e = e0 + g;
      Env& env = pool.env(e);
      TensorT<float> env_logits = TensorT<float>::zeros({M, net.config().num_actions});
      for (int i = 0; i < M; ++i)
        std::copy(logits.row_ptr(g * M + i), logits.row_ptr(g * M + i) + logits.cols(),
                  env_logits.row_ptr(i));
      const auto sampled = PolicyNet::sample_actions(env_logits, pool.action_rng(e));
      const auto logp = PolicyNet::log_probs_of(env_logits, sampled);
      const double reward = env.step(sampled);

      const size_t si = buf.step_index(t, e);
      buf.rewards[si] = static_cast<float>(reward);
      buf.dones[si] = env.state().done ? 1 : 0;
      for (int i = 0; i < M; ++i) {
        const size_t ai = buf.agent_index(t, e, i);
        const size_t row = static_cast<size_t>(g) * M + i;
        buf.actions[ai] = sampled[i];
        buf.log_probs[ai] = logp[i];
        buf.values[ai] = values.at(g * M + i, 0);
        std::copy(own.data.begin() + row * kObsDim, own.data.begin() + (row + 1) * kObsDim,
                  buf.own.begin() + ai * kObsDim);
        std::copy(rel.data.begin() + row * L * kEntityDim,
                  rel.data.begin() + (row + 1) * L * kEntityDim,
                  buf.rel.begin() + ai * L * kEntityDim);
      }
      acc[e].reward_sum += reward;
      running[e] += reward;
      if (env.state().done) {
        acc[e].episodes += 1;
        acc[e].successes += env.state().success ? 1 : 0;
        acc[e].episode_return_sum += running[e];
        acc[e].episode_len_sum += env.state().step;
        running[e] = 0.0;
        pool.reset_env(e);
      }
    }
  }
  // bootstrap values of the states the rollout stops in
  gather(-1);
  Tape tape;
  const auto outs = net.forward_tape(tape, own, rel, L, blocks);
  for (int g = 0; g < G; ++g)
    for (int i = 0; i < M; ++i)
      buf.bootstrap[static_cast<size_t>(e0 + g) * M + i] = tape.val(outs.values).at(g * M + i, 0);
}

}  // namespace

RolloutStats collect_rollout(EnvPool& pool, const PolicyNet& net, RolloutBuffer& buf, int T,
                             int threads) {
  const int N = pool.size();
  const int M = pool.env(0).world().num_agents;
  const int L = pool.env(0).world().num_landmarks;
  buf.allocate(T, N, M, L);

  std::vector<EnvAccum> acc(N);
  std::vector<double> running(N, 0.0);
  const int workers = std::max(1, std::min(threads, N));
  if (workers == 1) {
    run_group(pool, net, buf, T, 0, N, acc, running);
  } else {
    // contiguous env ranges per worker; disjoint buffer slots
    std::vector<std::thread> pool_threads;
    for (int w = 0; w < workers; ++w) {
      const int e0 = N * w / workers, e1 = N * (w + 1) / workers;
      if (e0 == e1) continue;
      pool_threads.emplace_back(
          [&, e0, e1] { run_group(pool, net, buf, T, e0, e1, acc, running); });
    }
    for (auto& th : pool_threads) th.join();
  }

  RolloutStats stats;
  double reward_sum = 0, ep_ret = 0, ep_len = 0;
  int episodes = 0, successes = 0;
  for (const auto& a : acc) {
    reward_sum += a.reward_sum;
    ep_ret += a.episode_return_sum;
    ep_len += a.episode_len_sum;
    episodes += a.episodes;
    successes += a.successes;
  }
  stats.mean_step_reward = reward_sum / (static_cast<double>(T) * N);
  stats.episodes_completed = episodes;
  if (episodes > 0) {
    stats.mean_episode_return = ep_ret / episodes;
    stats.mean_episode_length = ep_len / episodes;
    stats.success_rate = 100.0 * successes / episodes;
  }
  return stats;
}

}  // namespace swarm
