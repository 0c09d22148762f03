#pragma once

#include <string>
#include <vector>

#include "swarm/comm_graph.hpp"
#include "swarm/env.hpp"
#include "swarm/kernels.hpp"
#include "swarm/mask.hpp"
#include "swarm/nn.hpp"
#include "swarm/rng.hpp"
#include "swarm/tape.hpp"
#include "swarm/tensor.hpp"

namespace swarm {

enum class CommVariant { MHA, ExpKernel, Uniform };

inline const char* variant_name(CommVariant v) {
  switch (v) {
    case CommVariant::MHA: return "mha";
    case CommVariant::ExpKernel: return "exp";
    case CommVariant::Uniform: return "uniform";
  }
  return "?";
}

struct PolicyConfig {
  int hidden = 128;  // H; keys/queries/values share this width
  int hops = 3;      // C rounds of inter-agent message passing
  int heads = 4;     // multi-head attention only
  int num_actions = kNumActions;
  int obs_dim = kObsDim;
  int entity_dim = kEntityDim;
  CommVariant variant = CommVariant::MHA;
  bool tied_hops = false;  // share one comm parameter set across hops

  void validate() const {
    if (hidden < 1 || hops < 1 || heads < 1) throw std::invalid_argument("policy config: sizes must be >= 1");
    if (hidden % heads != 0) throw std::invalid_argument("policy config: heads must divide hidden");
  }
};

// The shared agent network. One parameter set serves every agent; nothing in
// the parameter shapes depends on the number of agents or entities, which is
// what makes curriculum transfer and zero-shot evaluation possible.
template <class S>
class PolicyNetT {
 public:
  using Tape = TapeT<S>;
  using Id = typename Tape::Id;

  PolicyNetT(PolicyConfig cfg, Rng& init_rng) : cfg_(cfg) {
    cfg_.validate();
    build(&init_rng);
  }

  // Zero-initialized parameters; for checkpoint loading.
  explicit PolicyNetT(PolicyConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    build(nullptr);
  }

  const PolicyConfig& config() const { return cfg_; }
  ParamSetT<S>& params() { return params_; }
  const ParamSetT<S>& params() const { return params_; }

  struct TapeOuts {
    Id logits;
    Id values;  // (R x 1)
  };

  // Batched forward: B timestep blocks of M agents stacked into R = B*M
  // rows. own is (R x obs_dim); rel is (R*L x entity_dim) with the entity
  // rows of agent row r at [r*L, (r+1)*L); blocks[b] masks rows
  // [b*M, (b+1)*M). Every row-level operation is shared with the
  // decentralized path, so single-timestep values are bit-identical to it.
  TapeOuts forward_tape(Tape& tape, const TensorT<S>& own, const TensorT<S>& rel, int L,
                        const std::vector<AdjacencyMask>& blocks,
                        std::vector<TensorT<S>>* attn_export = nullptr) const {
    const int R = own.rows();
    Id u = tape.relu(tape.affine(tape.constant(own), tape.param(*h_.agent_w), tape.param(*h_.agent_b)));
    Id env_emb;
    if (L > 0) {
      Id e = tape.relu(tape.affine(tape.constant(rel), tape.param(*h_.entity_w), tape.param(*h_.entity_b)));
      Id q = tape.linear(u, tape.param(*h_.eattn_q));
      Id k = tape.linear(e, tape.param(*h_.eattn_k));
      Id v = tape.linear(e, tape.param(*h_.eattn_v));
      env_emb = tape.entity_attention(q, k, v, L);
    } else {
      env_emb = tape.constant(TensorT<S>::zeros({R, cfg_.hidden}));
    }
    Id h = tape.relu(tape.affine(tape.concat_cols({u, env_emb}), tape.param(*h_.joint_w),
                                 tape.param(*h_.joint_b)));
    for (int c = 0; c < cfg_.hops; ++c) {
      const Hop& hp = h_.hops[c];
      TensorT<S>* wexp = nullptr;
      if (attn_export) {
        attn_export->emplace_back();
        wexp = &attn_export->back();
      }
      Id msg = -1;
      switch (cfg_.variant) {
        case CommVariant::MHA: {
          Id q = tape.linear(h, tape.param(*hp.w_q));
          Id k = tape.linear(h, tape.param(*hp.w_k));
          Id v = tape.linear(h, tape.param(*hp.w_v));
          msg = tape.attn_mha(q, k, v, blocks, cfg_.heads, wexp);
          break;
        }
        case CommVariant::ExpKernel: {
          Id k = tape.linear(h, tape.param(*hp.w_k));
          Id v = tape.linear(h, tape.param(*hp.w_v));
          msg = tape.attn_exp(k, v, blocks, wexp);
          break;
        }
        case CommVariant::Uniform: {
          Id v = tape.linear(h, tape.param(*hp.w_v));
          msg = tape.attn_uniform(v, blocks, wexp);
          break;
        }
      }
      Id out = tape.linear(msg, tape.param(*hp.w_out));
      h = tape.relu(tape.affine(tape.concat_cols({h, out}), tape.param(*hp.g_w), tape.param(*hp.g_b)));
    }
    TapeOuts outs;
    Id vh = tape.relu(tape.affine(h, tape.param(*h_.val_w1), tape.param(*h_.val_b1)));
    outs.values = tape.affine(vh, tape.param(*h_.val_w2), tape.param(*h_.val_b2));
    Id ph = tape.relu(tape.affine(h, tape.param(*h_.pol_w1), tape.param(*h_.pol_b1)));
    outs.logits = tape.affine(ph, tape.param(*h_.pol_w2), tape.param(*h_.pol_b2));
    return outs;
  }

  struct EvalOuts {
    Id log_probs;  // (R)
    Id entropy;    // (R)
    Id values;     // (R x 1)
  };

  // Differentiable log pi(a|s), entropy and value for chosen actions.
  EvalOuts evaluate_actions(Tape& tape, const TensorT<S>& own, const TensorT<S>& rel, int L,
                            const std::vector<AdjacencyMask>& blocks,
                            std::vector<int> actions) const {
    auto outs = forward_tape(tape, own, rel, L, blocks);
    EvalOuts e;
    e.log_probs = tape.action_log_prob(outs.logits, std::move(actions));
    e.entropy = tape.entropy_rows(outs.logits);
    e.values = outs.values;
    return e;
  }

  struct ForwardOutput {
    TensorT<S> logits;              // (M x A)
    std::vector<S> values;          // M
    std::vector<TensorT<S>> attention;  // per hop, (M x M) row-normalized weights
  };

  // Single-timestep inference. Runs the batched path with B=1 on a scratch
  // tape; no gradients.
  ForwardOutput forward(const std::vector<Observation>& obs, const AdjacencyMask& mask,
                        bool want_attention = false) const {
    const int M = static_cast<int>(obs.size());
    TensorT<S> own, rel;
    int L = 0;
    pack_observations(obs, own, rel, L);
    Tape tape;
    ForwardOutput fo;
    auto outs = forward_tape(tape, own, rel, L, {mask}, want_attention ? &fo.attention : nullptr);
    fo.logits = tape.val(outs.logits);
    fo.values.resize(M);
    for (int i = 0; i < M; ++i) fo.values[i] = tape.val(outs.values).at(i, 0);
    return fo;
  }

  // Per-agent evaluation path: each agent computes with its own observation
  // plus the (key, value) messages of its mask-neighbors, hop by hop.
  // Bit-identical to forward() because both run the same row kernels.
  ForwardOutput forward_decentralized(const std::vector<Observation>& obs,
                                      const AdjacencyMask& mask) const {
    const int M = static_cast<int>(obs.size());
    const int H = cfg_.hidden;
    const int L = M > 0 ? static_cast<int>(obs[0].rel.size()) : 0;
    std::vector<std::vector<S>> h(M);
    // local encoding: own state, entity aggregation, joint encoding
    for (int i = 0; i < M; ++i) {
      std::vector<S> own(cfg_.obs_dim);
      for (int d = 0; d < cfg_.obs_dim; ++d) own[d] = static_cast<S>(obs[i].own[d]);
      std::vector<S> u(H);
      kern::affine_rows(own.data(), 1, cfg_.obs_dim, h_.agent_w->value.data.data(),
                        h_.agent_b->value.data.data(), u.data(), H);
      kern::relu_rows(u.data(), u.data(), H);
      std::vector<S> env_emb(H, S(0));
      if (L > 0) {
        std::vector<S> rel(static_cast<size_t>(L) * cfg_.entity_dim);
        for (int l = 0; l < L; ++l) {
          rel[l * cfg_.entity_dim + 0] = static_cast<S>(obs[i].rel[l].x);
          rel[l * cfg_.entity_dim + 1] = static_cast<S>(obs[i].rel[l].y);
        }
        std::vector<S> e(static_cast<size_t>(L) * H);
        kern::affine_rows(rel.data(), L, cfg_.entity_dim, h_.entity_w->value.data.data(),
                          h_.entity_b->value.data.data(), e.data(), H);
        kern::relu_rows(e.data(), e.data(), static_cast<int64_t>(L) * H);
        std::vector<S> q(H), k(static_cast<size_t>(L) * H), v(static_cast<size_t>(L) * H);
        kern::affine_rows(u.data(), 1, H, h_.eattn_q->value.data.data(),
                          static_cast<const S*>(nullptr), q.data(), H);
        kern::affine_rows(e.data(), L, H, h_.eattn_k->value.data.data(),
                          static_cast<const S*>(nullptr), k.data(), H);
        kern::affine_rows(e.data(), L, H, h_.eattn_v->value.data.data(),
                          static_cast<const S*>(nullptr), v.data(), H);
        std::vector<S> scratch(L);
        kern::entity_attend_row(q.data(), k.data(), v.data(), L, H, env_emb.data(), scratch.data());
      }
      std::vector<S> joint(2 * H);
      std::copy(u.begin(), u.end(), joint.begin());
      std::copy(env_emb.begin(), env_emb.end(), joint.begin() + H);
      h[i].resize(H);
      kern::affine_rows(joint.data(), 1, 2 * H, h_.joint_w->value.data.data(),
                        h_.joint_b->value.data.data(), h[i].data(), H);
      kern::relu_rows(h[i].data(), h[i].data(), H);
    }
    // C hops of neighbor message exchange
    std::vector<std::vector<S>> next(M);
    for (int c = 0; c < cfg_.hops; ++c) {
      const Hop& hp = h_.hops[c];
      const int kdim = cfg_.variant == CommVariant::ExpKernel ? 1 : H;
      // every agent computes its outgoing message locally
      std::vector<std::vector<S>> key(M), msg_v(M), q(M);
      for (int i = 0; i < M; ++i) {
        msg_v[i].resize(H);
        kern::affine_rows(h[i].data(), 1, H, hp.w_v->value.data.data(),
                          static_cast<const S*>(nullptr), msg_v[i].data(), H);
        if (cfg_.variant != CommVariant::Uniform) {
          key[i].resize(kdim);
          kern::affine_rows(h[i].data(), 1, H, hp.w_k->value.data.data(),
                            static_cast<const S*>(nullptr), key[i].data(), kdim);
        }
        if (cfg_.variant == CommVariant::MHA) {
          q[i].resize(H);
          kern::affine_rows(h[i].data(), 1, H, hp.w_q->value.data.data(),
                            static_cast<const S*>(nullptr), q[i].data(), H);
        }
      }
      // each agent aggregates only the messages of its neighbors
      for (int i = 0; i < M; ++i) {
        std::vector<const S*> kp, vp;
        for (int j = 0; j < M; ++j) {
          if (!mask.at(i, j)) continue;
          kp.push_back(cfg_.variant == CommVariant::Uniform ? nullptr : key[j].data());
          vp.push_back(msg_v[j].data());
        }
        const int nn = static_cast<int>(vp.size());
        std::vector<S> agg(H), scratch(nn);
        switch (cfg_.variant) {
          case CommVariant::MHA:
            kern::mha_attend_row(q[i].data(), kp.data(), vp.data(), nn, H, cfg_.heads,
                                 agg.data(), scratch.data());
            break;
          case CommVariant::ExpKernel:
            kern::exp_attend_row(key[i][0], kp.data(), vp.data(), nn, H, agg.data(),
                                 scratch.data());
            break;
          case CommVariant::Uniform:
            kern::uniform_attend_row(vp.data(), nn, H, agg.data());
            break;
        }
        std::vector<S> out(H);
        kern::affine_rows(agg.data(), 1, H, hp.w_out->value.data.data(),
                          static_cast<const S*>(nullptr), out.data(), H);
        std::vector<S> cat(2 * H);
        std::copy(h[i].begin(), h[i].end(), cat.begin());
        std::copy(out.begin(), out.end(), cat.begin() + H);
        next[i].resize(H);
        kern::affine_rows(cat.data(), 1, 2 * H, hp.g_w->value.data.data(),
                          hp.g_b->value.data.data(), next[i].data(), H);
        kern::relu_rows(next[i].data(), next[i].data(), H);
      }
      h.swap(next);
    }
    // heads
    ForwardOutput fo;
    fo.logits = TensorT<S>::zeros({M, cfg_.num_actions});
    fo.values.resize(M);
    for (int i = 0; i < M; ++i) {
      std::vector<S> t(H);
      kern::affine_rows(h[i].data(), 1, H, h_.val_w1->value.data.data(),
                        h_.val_b1->value.data.data(), t.data(), H);
      kern::relu_rows(t.data(), t.data(), H);
      S value;
      kern::affine_rows(t.data(), 1, H, h_.val_w2->value.data.data(),
                        h_.val_b2->value.data.data(), &value, 1);
      fo.values[i] = value;
      kern::affine_rows(h[i].data(), 1, H, h_.pol_w1->value.data.data(),
                        h_.pol_b1->value.data.data(), t.data(), H);
      kern::relu_rows(t.data(), t.data(), H);
      kern::affine_rows(t.data(), 1, H, h_.pol_w2->value.data.data(),
                        h_.pol_b2->value.data.data(), fo.logits.row_ptr(i), cfg_.num_actions);
    }
    return fo;
  }

  static std::vector<int> sample_actions(const TensorT<S>& logits, Rng& rng) {
    const int M = logits.rows(), A = logits.cols();
    std::vector<int> actions(M);
    std::vector<S> scratch(A);
    for (int i = 0; i < M; ++i)
      actions[i] = kern::sample_categorical(logits.row_ptr(i), A, rng.uniform(), scratch.data());
    return actions;
  }

  static std::vector<int> greedy_actions(const TensorT<S>& logits) {
    const int M = logits.rows(), A = logits.cols();
    std::vector<int> actions(M);
    for (int i = 0; i < M; ++i) actions[i] = kern::argmax_row(logits.row_ptr(i), A);
    return actions;
  }

  static std::vector<S> log_probs_of(const TensorT<S>& logits, const std::vector<int>& actions) {
    const int M = logits.rows(), A = logits.cols();
    std::vector<S> out(M), lp(A);
    for (int i = 0; i < M; ++i) {
      kern::log_softmax_row(logits.row_ptr(i), A, lp.data());
      out[i] = lp[actions[i]];
    }
    return out;
  }

  // Stacks one timestep of observations into the batched layout.
  void pack_observations(const std::vector<Observation>& obs, TensorT<S>& own, TensorT<S>& rel,
                         int& L) const {
    const int M = static_cast<int>(obs.size());
    L = M > 0 ? static_cast<int>(obs[0].rel.size()) : 0;
    own = TensorT<S>::zeros({M, cfg_.obs_dim});
    rel = TensorT<S>::zeros({M * L, cfg_.entity_dim});
    for (int i = 0; i < M; ++i) {
      for (int d = 0; d < cfg_.obs_dim; ++d) own.at(i, d) = static_cast<S>(obs[i].own[d]);
      for (int l = 0; l < L; ++l) {
        rel.at(i * L + l, 0) = static_cast<S>(obs[i].rel[l].x);
        rel.at(i * L + l, 1) = static_cast<S>(obs[i].rel[l].y);
      }
    }
  }

 private:
  struct Hop {
    ParameterT<S>* w_q = nullptr;
    ParameterT<S>* w_k = nullptr;
    ParameterT<S>* w_v = nullptr;
    ParameterT<S>* w_out = nullptr;
    ParameterT<S>* g_w = nullptr;
    ParameterT<S>* g_b = nullptr;
  };
  struct Handles {
    ParameterT<S>*agent_w, *agent_b, *entity_w, *entity_b;
    ParameterT<S>*eattn_q, *eattn_k, *eattn_v;
    ParameterT<S>*joint_w, *joint_b;
    std::vector<Hop> hops;
    ParameterT<S>*val_w1, *val_b1, *val_w2, *val_b2;
    ParameterT<S>*pol_w1, *pol_b1, *pol_w2, *pol_b2;
  };

  // Creates all parameters in a fixed order (the checkpoint layout) and
  // wires the handle table. Weights get orthogonal init, biases zeros.
  void build(Rng* rng) {
    const int H = cfg_.hidden;
    auto mat = [&](const std::string& name, int r, int c) {
      return &params_.add(name, rng ? orthogonal_init<S>(r, c, *rng) : TensorT<S>::zeros({r, c}));
    };
    auto vec = [&](const std::string& name, int n) {
      return &params_.add(name, TensorT<S>::zeros({n}));
    };
    h_.agent_w = mat("agent_enc.w", cfg_.obs_dim, H);
    h_.agent_b = vec("agent_enc.b", H);
    h_.entity_w = mat("entity_enc.w", cfg_.entity_dim, H);
    h_.entity_b = vec("entity_enc.b", H);
    h_.eattn_q = mat("entity_attn.w_q", H, H);
    h_.eattn_k = mat("entity_attn.w_k", H, H);
    h_.eattn_v = mat("entity_attn.w_v", H, H);
    h_.joint_w = mat("joint_enc.w", 2 * H, H);
    h_.joint_b = vec("joint_enc.b", H);
    const int hop_sets = cfg_.tied_hops ? 1 : cfg_.hops;
    std::vector<Hop> sets;
    for (int c = 0; c < hop_sets; ++c) {
      const std::string p = "comm.hop" + std::to_string(c) + ".";
      Hop hp;
      if (cfg_.variant == CommVariant::MHA) hp.w_q = mat(p + "w_q", H, H);
      if (cfg_.variant == CommVariant::MHA) hp.w_k = mat(p + "w_k", H, H);
      if (cfg_.variant == CommVariant::ExpKernel) hp.w_k = mat(p + "w_k", H, 1);
      hp.w_v = mat(p + "w_v", H, H);
      hp.w_out = mat(p + "w_out", H, H);
      hp.g_w = mat(p + "g_w", 2 * H, H);
      hp.g_b = vec(p + "g_b", H);
      sets.push_back(hp);
    }
    for (int c = 0; c < cfg_.hops; ++c) h_.hops.push_back(sets[cfg_.tied_hops ? 0 : c]);
    h_.val_w1 = mat("value_head.w1", H, H);
    h_.val_b1 = vec("value_head.b1", H);
    h_.val_w2 = mat("value_head.w2", H, 1);
    h_.val_b2 = vec("value_head.b2", 1);
    h_.pol_w1 = mat("policy_head.w1", H, H);
    h_.pol_b1 = vec("policy_head.b1", H);
    h_.pol_w2 = mat("policy_head.w2", H, cfg_.num_actions);
    h_.pol_b2 = vec("policy_head.b2", cfg_.num_actions);
  }

  PolicyConfig cfg_;
  ParamSetT<S> params_;
  Handles h_;
};

using PolicyNet = PolicyNetT<float>;

}  // namespace swarm
