#include <doctest.h>

#include <cmath>

#include "fd_check.hpp"
#include "swarm/policy.hpp"

using namespace swarm;

namespace {

PolicyConfig small_cfg(CommVariant v = CommVariant::MHA) {
  PolicyConfig cfg;
  cfg.hidden = 32;
  cfg.heads = 4;
  cfg.hops = 3;
  cfg.variant = v;
  return cfg;
}

std::vector<Observation> random_obs(int m, int l, Rng& rng) {
  std::vector<Observation> obs(m);
  for (auto& o : obs) {
    for (auto& v : o.own) v = rng.uniform(-2, 2);
    o.rel.resize(l);
    for (auto& r : o.rel) {
      r.x = rng.uniform(-2, 2);
      r.y = rng.uniform(-2, 2);
    }
  }
  return obs;
}

}  // namespace

TEST_CASE("entity attention: single entity gets weight one") {
  TapeT<double> tape;
  Rng rng(3);
  auto q = tape.constant({{1, 4}, {0.3, -0.2, 0.5, 0.1}});
  auto k = tape.constant({{1, 4}, {1.0, 0.0, 0.0, 0.0}});
  auto v = tape.constant({{1, 4}, {0.7, -0.3, 0.2, 0.9}});
  auto e = tape.entity_attention(q, k, v, 1);
  for (int d = 0; d < 4; ++d) CHECK(tape.val(e).at(0, d) == tape.val(v).at(0, d));
}

TEST_CASE("entity attention: identical entities share weight equally") {
  // identical relative positions produce identical keys/values; output must
  // equal the common value row
  TapeT<double> tape;
  auto q = tape.constant({{1, 2}, {0.4, -0.8}});
  auto k = tape.constant({{2, 2}, {0.5, 0.25, 0.5, 0.25}});
  auto v = tape.constant({{2, 2}, {1.5, -2.0, 1.5, -2.0}});
  auto e = tape.entity_attention(q, k, v, 2);
  CHECK(tape.val(e).at(0, 0) == doctest::Approx(1.5));
  CHECK(tape.val(e).at(0, 1) == doctest::Approx(-2.0));
}

TEST_CASE("uniform attention weights are 1/degree") {
  TapeT<float> tape;
  auto v = tape.constant(TensorT<float>::zeros({3, 4}));
  AdjacencyMask chain(3);
  chain.set(0, 1, true);
  chain.set(1, 2, true);
  TensorT<float> w;
  tape.attn_uniform(v, {chain}, &w);
  CHECK(w.at(0, 0) == doctest::Approx(0.5));
  CHECK(w.at(0, 1) == doctest::Approx(0.5));
  CHECK(w.at(0, 2) == 0.0f);
  CHECK(w.at(1, 0) == doctest::Approx(1.0f / 3));
  CHECK(w.at(2, 2) == doctest::Approx(0.5));
}

TEST_CASE("exponential attention with equal keys is uniform") {
  TapeT<float> tape;
  auto k = tape.constant({{3, 1}, {0.7f, 0.7f, 0.7f}});
  auto v = tape.constant(TensorT<float>::zeros({3, 4}));
  TensorT<float> w;
  tape.attn_exp(k, v, {AdjacencyMask(3, true)}, &w);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(w.at(i, j) == doctest::Approx(1.0f / 3));
}

TEST_CASE("multi-head attention matches the closed-form softmax on a toy case") {
  // M=2 fully connected, D=2, one head: weights = softmax(q_m.k_n / sqrt(2))
  TapeT<double> tape;
  auto q = tape.constant({{2, 2}, {1.0, 0.5, -0.3, 0.2}});
  auto k = tape.constant({{2, 2}, {0.4, -0.6, 0.9, 0.1}});
  auto v = tape.constant({{2, 2}, {1.0, 2.0, 3.0, 4.0}});
  TensorT<double> w;
  auto out = tape.attn_mha(q, k, v, {AdjacencyMask(2, true)}, 1, &w);
  const double s = 1.0 / std::sqrt(2.0);
  const double z0 = (1.0 * 0.4 + 0.5 * -0.6) * s;
  const double z1 = (1.0 * 0.9 + 0.5 * 0.1) * s;
  const double w00 = std::exp(z0) / (std::exp(z0) + std::exp(z1));
  CHECK(w.at(0, 0) == doctest::Approx(w00).epsilon(1e-12));
  CHECK(w.at(0, 1) == doctest::Approx(1.0 - w00).epsilon(1e-12));
  CHECK(tape.val(out).at(0, 0) == doctest::Approx(w00 * 1.0 + (1 - w00) * 3.0));
  CHECK(tape.val(out).at(0, 1) == doctest::Approx(w00 * 2.0 + (1 - w00) * 4.0));
}

TEST_CASE("forward runs for any team size with one parameter set") {
  Rng rng(11);
  PolicyNet net(small_cfg(), rng);
  for (int m : {1, 2, 5}) {
    Rng orng(100 + m);
    auto obs = random_obs(m, 3, orng);
    auto out = net.forward(obs, AdjacencyMask(m, true));
    CHECK(out.logits.rows() == m);
    CHECK(out.logits.cols() == 5);
    CHECK(static_cast<int>(out.values.size()) == m);
    CHECK(out.logits.all_finite());
  }
  // entity-count invariance: same parameters, different L
  for (int l : {1, 4, 9}) {
    Rng orng(200 + l);
    auto obs = random_obs(3, l, orng);
    CHECK(net.forward(obs, AdjacencyMask(3, true)).logits.all_finite());
  }
}

TEST_CASE("joint agent permutation permutes outputs") {
  Rng rng(21);
  PolicyNet net(small_cfg(), rng);
  Rng orng(5);
  const int m = 4;
  auto obs = random_obs(m, 2, orng);
  AdjacencyMask mask(m);
  mask.set(0, 1, true);
  mask.set(1, 2, true);
  mask.set(2, 3, true);
  auto base = net.forward(obs, mask);

  const std::vector<int> perm = {2, 0, 3, 1};  // new index i holds old perm[i]
  std::vector<Observation> pobs(m);
  AdjacencyMask pmask(m);
  for (int i = 0; i < m; ++i) {
    pobs[i] = obs[perm[i]];
    for (int j = 0; j < m; ++j)
      if (i != j && mask.at(perm[i], perm[j])) pmask.set(i, j, true);
  }
  auto permuted = net.forward(pobs, pmask);
  for (int i = 0; i < m; ++i) {
    CHECK(permuted.values[i] == doctest::Approx(base.values[perm[i]]).epsilon(1e-5));
    for (int a = 0; a < 5; ++a)
      CHECK(permuted.logits.at(i, a) == doctest::Approx(base.logits.at(perm[i], a)).epsilon(1e-5));
  }
}

TEST_CASE("entity permutation changes outputs only within tolerance") {
  Rng rng(31);
  PolicyNet net(small_cfg(CommVariant::ExpKernel), rng);
  Rng orng(7);
  auto obs = random_obs(3, 4, orng);
  auto base = net.forward(obs, AdjacencyMask(3, true));
  auto shuffled = obs;
  for (auto& o : shuffled) {
    std::swap(o.rel[0], o.rel[3]);
    std::swap(o.rel[1], o.rel[2]);
  }
  auto out = net.forward(shuffled, AdjacencyMask(3, true));
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 5; ++a)
      CHECK(out.logits.at(i, a) == doctest::Approx(base.logits.at(i, a)).epsilon(1e-5));
}

TEST_CASE("hop locality on a chain") {
  // 5-agent chain, C=3 hops: agent 4 is 4 edges from agent 0, so a
  // perturbation of agent 0 cannot reach it; agent 3 is within range.
  PolicyConfig cfg = small_cfg();
  Rng rng(41);
  PolicyNet net(cfg, rng);
  const int m = 5;
  Rng orng(9);
  auto obs = random_obs(m, 2, orng);
  AdjacencyMask chain(m);
  for (int i = 0; i + 1 < m; ++i) chain.set(i, i + 1, true);

  auto base = net.forward(obs, chain);
  auto perturbed = obs;
  perturbed[0].own[0] += 0.5;
  perturbed[0].own[2] -= 0.25;
  auto far = net.forward(perturbed, chain);
  for (int a = 0; a < 5; ++a) CHECK(far.logits.at(4, a) == base.logits.at(4, a));  // bitwise
  CHECK(far.values[4] == base.values[4]);

  auto nearp = obs;
  nearp[3].own[1] += 0.5;
  auto near_out = net.forward(nearp, chain);
  bool changed = false;
  for (int a = 0; a < 5; ++a) changed |= near_out.logits.at(4, a) != base.logits.at(4, a);
  CHECK(changed);
}

TEST_CASE("disconnected components cannot influence each other") {
  for (auto variant : {CommVariant::MHA, CommVariant::ExpKernel, CommVariant::Uniform}) {
    Rng rng(51);
    PolicyNet net(small_cfg(variant), rng);
    Rng orng(13);
    auto obs = random_obs(4, 2, orng);
    AdjacencyMask mask(4);
    mask.set(0, 1, true);
    mask.set(2, 3, true);
    auto base = net.forward(obs, mask);
    auto perturbed = obs;
    perturbed[2].own[0] += 1.0;
    perturbed[3].own[1] -= 1.0;
    auto out = net.forward(perturbed, mask);
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 5; ++a) CHECK(out.logits.at(i, a) == base.logits.at(i, a));
  }
}

TEST_CASE("decentralized forward equals batched forward bitwise") {
  for (auto variant : {CommVariant::MHA, CommVariant::ExpKernel, CommVariant::Uniform}) {
    CAPTURE(variant_name(variant));
    Rng rng(61);
    PolicyNet net(small_cfg(variant), rng);
    Rng orng(17);
    for (int trial = 0; trial < 5; ++trial) {
      const int m = 1 + static_cast<int>(orng.below(5));
      auto obs = random_obs(m, 3, orng);
      AdjacencyMask mask(m);
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (orng.uniform() < 0.5) mask.set(i, j, true);
      auto batched = net.forward(obs, mask);
      auto local = net.forward_decentralized(obs, mask);
      CHECK(batched.logits.data == local.logits.data);
      CHECK(batched.values == local.values);
    }
  }
}

TEST_CASE("M=1 output depends only on that agent's observation") {
  Rng rng(71);
  PolicyNet net(small_cfg(), rng);
  Rng orng(19);
  auto obs = random_obs(1, 2, orng);
  auto out = net.forward(obs, AdjacencyMask(1, true));
  CHECK(out.logits.rows() == 1);
  CHECK(out.logits.all_finite());
}

TEST_CASE("action sampling") {
  TensorT<float> uniform_logits = TensorT<float>::zeros({1, 5});
  Rng rng(81);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[PolicyNet::sample_actions(uniform_logits, rng)[0]]++;
  for (int a = 0; a < 5; ++a)
    CHECK(std::abs(counts[a] / static_cast<double>(n) - 0.2) < 0.005);

  TensorT<float> peaked = TensorT<float>::zeros({1, 5});
  peaked.at(0, 3) = 30.0f;
  for (int i = 0; i < 100; ++i) CHECK(PolicyNet::sample_actions(peaked, rng)[0] == 3);

  TensorT<float> g = TensorT<float>::zeros({1, 5});
  g.at(0, 2) = 3.0f;
  CHECK(PolicyNet::greedy_actions(g)[0] == 2);
  // lowest-index tie-break
  CHECK(PolicyNet::greedy_actions(TensorT<float>::zeros({1, 5}))[0] == 0);
}

TEST_CASE("evaluate_actions entropy and log-prob semantics") {
  Rng rng(91);
  PolicyConfig cfg = small_cfg();
  PolicyNet net(cfg, rng);
  // zero the policy head so logits are exactly uniform
  auto* w2 = net.params().find("policy_head.w2");
  auto* b2 = net.params().find("policy_head.b2");
  std::fill(w2->value.data.begin(), w2->value.data.end(), 0.0f);
  std::fill(b2->value.data.begin(), b2->value.data.end(), 0.0f);

  Rng orng(23);
  auto obs = random_obs(3, 2, orng);
  TensorT<float> own, rel;
  int L;
  net.pack_observations(obs, own, rel, L);
  Tape tape;
  auto outs = net.evaluate_actions(tape, own, rel, L, {AdjacencyMask(3, true)}, {0, 1, 2});
  for (int i = 0; i < 3; ++i) {
    CHECK(tape.val(outs.entropy).data[i] == doctest::Approx(std::log(5.0)).epsilon(1e-6));
    CHECK(tape.val(outs.log_probs).data[i] <= 0.0f);
    CHECK(tape.val(outs.log_probs).data[i] == doctest::Approx(std::log(0.2)).epsilon(1e-6));
  }
}

TEST_CASE("full pipeline gradients match finite differences") {
  // small double-precision net; loss touches log-prob, entropy and value
  for (auto variant : {CommVariant::MHA, CommVariant::ExpKernel, CommVariant::Uniform}) {
    CAPTURE(variant_name(variant));
    PolicyConfig cfg;
    cfg.hidden = 8;
    cfg.heads = 2;
    cfg.hops = 2;
    Rng rng(101);
    cfg.variant = variant;
    PolicyNetT<double> net(cfg, rng);

    const int m = 3, b = 2;
    Rng orng(29);
    TensorT<double> own = TensorT<double>::zeros({b * m, 4});
    TensorT<double> rel = TensorT<double>::zeros({b * m * 2, 2});
    for (auto& v : own.data) v = orng.uniform(-1, 1);
    for (auto& v : rel.data) v = orng.uniform(-1, 1);
    AdjacencyMask chain(m);
    chain.set(0, 1, true);
    chain.set(1, 2, true);
    std::vector<AdjacencyMask> blocks = {chain, AdjacencyMask(m, true)};
    std::vector<int> actions = {0, 4, 2, 1, 3, 0};

    fd::check_grads(net.params(), [&](fd::Tape64& tape, fd::Params64&) {
      auto outs = net.evaluate_actions(tape, own, rel, 2, blocks, actions);
      auto l1 = tape.mean_all(outs.log_probs);
      auto l2 = tape.mean_all(outs.entropy);
      auto l3 = tape.mean_all(outs.values);
      return tape.add(l1, tape.add(tape.scale(l2, 0.3), tape.scale(l3, 0.7)));
    });
  }
}

TEST_CASE("tied hops reuse one parameter set") {
  PolicyConfig cfg = small_cfg();
  cfg.tied_hops = true;
  Rng rng(111);
  PolicyNet net(cfg, rng);
  CHECK(net.params().find("comm.hop0.w_v") != nullptr);
  CHECK(net.params().find("comm.hop1.w_v") == nullptr);
  Rng orng(31);
  auto obs = random_obs(3, 2, orng);
  CHECK(net.forward(obs, AdjacencyMask(3, true)).logits.all_finite());
}
