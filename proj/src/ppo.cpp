#include "swarm/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace swarm {

std::vector<double> compute_gae_f64(const RolloutBuffer& buf, double gamma, double lambda) {
  std::vector<double> advantages(static_cast<size_t>(buf.T) * buf.N * buf.M, 0.0);
  for (int e = 0; e < buf.N; ++e) {
    for (int i = 0; i < buf.M; ++i) {
      double adv = 0.0;
      for (int t = buf.T - 1; t >= 0; --t) {
        const size_t ai = buf.agent_index(t, e, i);
        const double nonterminal = buf.dones[buf.step_index(t, e)] ? 0.0 : 1.0;
        const double next_value =
            t + 1 < buf.T ? buf.values[buf.agent_index(t + 1, e, i)]
                          : buf.bootstrap[static_cast<size_t>(e) * buf.M + i];
        const double delta = buf.rewards[buf.step_index(t, e)] +
                             gamma * next_value * nonterminal - buf.values[ai];
        adv = delta + gamma * lambda * nonterminal * adv;
        advantages[ai] = adv;
      }
    }
  }
  return advantages;
}

GaeOutput compute_gae(const RolloutBuffer& buf, double gamma, double lambda) {
  const auto adv64 = compute_gae_f64(buf, gamma, lambda);
  GaeOutput out;
  out.advantages.resize(adv64.size());
  out.returns.resize(adv64.size());
  for (size_t i = 0; i < adv64.size(); ++i) {
    out.advantages[i] = static_cast<float>(adv64[i]);
    out.returns[i] = static_cast<float>(adv64[i] + buf.values[i]);
  }
  return out;
}

void normalize_advantages(std::vector<float>& adv) {
  if (adv.empty()) return;
  double mean = 0;
  for (float a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0;
  for (float a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double denom = std::sqrt(var) + 1e-8;
  for (float& a : adv) a = static_cast<float>((a - mean) / denom);
}

PpoDriver::PpoDriver(PolicyNet& net, PpoConfig cfg, uint64_t seed)
    : net_(net), cfg_(cfg), adam_(AdamState::for_params(net.params())),
      shuffle_rng_(derive_seed(seed, stream::kShuffle)) {
  cfg_.validate();
}

IterationStats PpoDriver::train_iteration(EnvPool& pool, int threads) {
  IterationStats stats;
  RolloutBuffer buf;
  stats.rollout = collect_rollout(pool, net_, buf, cfg_.rollout_len, threads);
  stats.timesteps = static_cast<int64_t>(buf.T) * buf.N;
  const auto gae = compute_gae(buf, cfg_.gamma, cfg_.lambda);
  stats.update = update(buf, gae);
  return stats;
}

UpdateStats PpoDriver::update(const RolloutBuffer& buf, const GaeOutput& gae) {
  const int steps = buf.T * buf.N;
  const int per_batch = steps / cfg_.minibatches;
  const int M = buf.M, L = buf.L;
  std::vector<int> order(steps);
  std::iota(order.begin(), order.end(), 0);

  UpdateStats acc;
  int batches = 0;
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg_.lr;

  TensorT<float> own = TensorT<float>::zeros({per_batch * M, kObsDim});
  TensorT<float> rel = TensorT<float>::zeros({per_batch * M * L, kEntityDim});
  std::vector<int> actions(static_cast<size_t>(per_batch) * M);
  TensorT<float> logp_old = TensorT<float>::zeros({per_batch * M});
  TensorT<float> adv = TensorT<float>::zeros({per_batch * M});
  TensorT<float> returns = TensorT<float>::zeros({per_batch * M, 1});

  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    // Fisher-Yates shuffle of (t, env) slices
    for (int i = steps - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng_.below(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int mb = 0; mb < cfg_.minibatches; ++mb) {
      std::vector<AdjacencyMask> blocks(per_batch);
      for (int s = 0; s < per_batch; ++s) {
        const int flat = order[mb * per_batch + s];
        const int t = flat / buf.N, e = flat % buf.N;
        blocks[s] = buf.masks[buf.step_index(t, e)];
        for (int i = 0; i < M; ++i) {
          const size_t src = buf.agent_index(t, e, i);
          const size_t dst = static_cast<size_t>(s) * M + i;
          actions[dst] = buf.actions[src];
          logp_old.data[dst] = buf.log_probs[src];
          adv.data[dst] = gae.advantages[src];
          returns.data[dst] = gae.returns[src];
          std::copy(buf.own.begin() + src * kObsDim, buf.own.begin() + (src + 1) * kObsDim,
                    own.data.begin() + dst * kObsDim);
          std::copy(buf.rel.begin() + src * L * kEntityDim,
                    buf.rel.begin() + (src + 1) * L * kEntityDim,
                    rel.data.begin() + dst * L * kEntityDim);
        }
      }
      if (cfg_.advantage_norm) normalize_advantages(adv.data);

      Tape tape;
      auto ev = net_.evaluate_actions(tape, own, rel, L, blocks, actions);
      auto ratio = tape.exp_of(tape.sub_const(ev.log_probs, logp_old));
      auto surr1 = tape.mul_const(ratio, adv);
      auto surr2 = tape.mul_const(
          tape.clip(ratio, static_cast<float>(1.0 - cfg_.clip_eps),
                    static_cast<float>(1.0 + cfg_.clip_eps)),
          adv);
      auto policy_loss = tape.scale(tape.mean_all(tape.min2(surr1, surr2)), -1.f);
      auto value_loss = tape.mean_all(tape.square(tape.sub_const(ev.values, returns)));
      auto entropy = tape.mean_all(ev.entropy);
      auto loss = tape.add(policy_loss,
                           tape.add(tape.scale(value_loss, static_cast<float>(cfg_.value_coef)),
                                    tape.scale(entropy, static_cast<float>(-cfg_.entropy_coef))));
      const float loss_v = tape.val(loss).data[0];
      if (!std::isfinite(loss_v)) {
        // locate the first offending sample for the diagnostic
        int64_t bad = -1;
        const auto& rv = tape.val(ratio);
        for (int64_t i = 0; i < rv.numel(); ++i)
          if (!std::isfinite(rv.data[i])) {
            bad = i;
            break;
          }
        throw std::runtime_error("ppo: non-finite loss in minibatch " + std::to_string(mb) +
                                 " (first bad sample index " + std::to_string(bad) + ")");
      }

      net_.params().zero_grad();
      tape.backward(loss);
      acc.grad_norm += clip_global_norm(net_.params(), cfg_.grad_clip);
      adam_step(net_.params(), adam_, adam_cfg);

      int clipped = 0;
      for (float r : tape.val(ratio).data)
        if (std::abs(r - 1.f) > cfg_.clip_eps) ++clipped;
      acc.clip_fraction += static_cast<double>(clipped) / tape.val(ratio).numel();
      acc.loss += loss_v;
      acc.policy_loss += tape.val(policy_loss).data[0];
      acc.value_loss += tape.val(value_loss).data[0];
      acc.entropy += tape.val(entropy).data[0];
      ++batches;
    }
  }
  acc.loss /= batches;
  acc.policy_loss /= batches;
  acc.value_loss /= batches;
  acc.entropy /= batches;
  acc.clip_fraction /= batches;
  acc.grad_norm /= batches;
  return acc;
}

}  // namespace swarm
