// Acceptance suite. `properties` (default) runs the fully-deterministic
// criteria in seconds and prints one PASS/FAIL line each. The train-*
// subcommands run the desk-scale training reproductions (stochastic, three
// seeds, hours on a desktop CPU) and pass when at least two seeds meet the
// bar.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "swarm/checkpoint.hpp"
#include "swarm/comm_graph.hpp"
#include "swarm/config.hpp"
#include "swarm/policy.hpp"
#include "swarm/ppo.hpp"
#include "swarm/tasks.hpp"
#include "swarm/trainer.hpp"

using namespace swarm;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s — %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// ---------------------------------------------------------------- gradients

using Tape64 = TapeT<double>;
using Params64 = ParamSetT<double>;

TensorT<double> randt(std::vector<int> shape, Rng& rng, double lo = -1.5, double hi = 1.5) {
  auto t = TensorT<double>::zeros(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

struct FdCounter {
  int cases = 0;
  int coords = 0;
  double worst = 0.0;
  bool ok = true;
};

// Central finite differences (64-bit, h = 1e-5) against the tape gradient
// for every parameter coordinate of the builder's loss.
void fd_case(FdCounter& c, Params64& ps,
             const std::function<Tape64::Id(Tape64&, Params64&)>& build,
             const char* tag = "?") {
  ps.zero_grad();
  {
    Tape64 t;
    t.backward(build(t, ps));
  }
  const double h = 1e-5;
  for (size_t p = 0; p < ps.size(); ++p) {
    auto& par = ps.at(p);
    for (int64_t j = 0; j < par.value.numel(); ++j) {
      const double orig = par.value.data[j];
      auto eval = [&](double v) {
        par.value.data[j] = v;
        Tape64 t;
        const double out = t.val(build(t, ps)).data[0];
        par.value.data[j] = orig;
        return out;
      };
      const double numeric = (eval(orig + h) - eval(orig - h)) / (2 * h);
      const double analytic = par.grad.data[j];
      const double err = std::abs(analytic - numeric);
      const double rel = err / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
      c.worst = std::max(c.worst, rel);
      if (err > 1e-7 && rel > 1e-4) {
        if (c.ok)
          std::printf("  [fd] first failure: %s param %s idx %lld analytic %.6e numeric %.6e\n",
                      tag, par.name.c_str(), static_cast<long long>(j), analytic, numeric);
        c.ok = false;
      }
      ++c.coords;
    }
  }
  ++c.cases;
}

void criterion_gradients() {
  Rng rng(2027);
  FdCounter c;
  // primitive ops on randomized shapes
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    const int in = 1 + static_cast<int>(rng.below(6));
    const int out = 1 + static_cast<int>(rng.below(6));
    {
      Params64 ps;
      ps.add("x", randt({n, in}, rng));
      ps.add("w", randt({in, out}, rng));
      ps.add("b", randt({out}, rng));
      auto wts = randt({n, out}, rng, 0.5, 1.5);
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        auto y = t.affine(t.param(*p.find("x")), t.param(*p.find("w")), t.param(*p.find("b")));
        return t.mean_all(t.mul_const(y, wts));
      }, "affine");
    }
    {
      Params64 ps;
      auto x = randt({n, in}, rng);
      for (auto& v : x.data) v += v >= 0 ? 0.05 : -0.05;  // keep clear of the kink
      ps.add("x", std::move(x));
      auto wts = randt({n, in}, rng, 0.5, 1.5);
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        return t.mean_all(t.mul_const(t.relu(t.param(*p.find("x"))), wts));
      }, "relu");
    }
    {
      const int cols = 2 + static_cast<int>(rng.below(4));
      Params64 ps;
      ps.add("z", randt({n, cols}, rng));
      std::vector<uint8_t> mask(static_cast<size_t>(n) * cols, 0);
      for (int r = 0; r < n; ++r) {
        mask[r * cols + rng.below(cols)] = 1;
        for (int k = 0; k < cols; ++k)
          if (rng.uniform() < 0.6) mask[r * cols + k] = 1;
      }
      auto wts = randt({n, cols}, rng, 0.5, 1.5);
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        return t.mean_all(t.mul_const(t.masked_softmax(t.param(*p.find("z")), mask), wts));
      }, "masked_softmax");
    }
    {
      Params64 ps;
      ps.add("a", randt({n, in}, rng));
      ps.add("b", randt({n, out}, rng));
      auto wts = randt({n, in + out}, rng, 0.5, 1.5);
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        auto y = t.concat_cols({t.param(*p.find("a")), t.param(*p.find("b"))});
        return t.mean_all(t.mul_const(y, wts));
      }, "concat");
    }
  }
  // attention primitives under chain + full masks
  for (int trial = 0; trial < 8; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(3));
    const int d = 4 + 2 * static_cast<int>(rng.below(3));
    AdjacencyMask chain(m);
    for (int i = 0; i + 1 < m; ++i) chain.set(i, i + 1, true);
    std::vector<AdjacencyMask> blocks = {chain, AdjacencyMask(m, true)};
    auto wts = randt({2 * m, d}, rng, 0.5, 1.5);
    {
      Params64 ps;
      ps.add("q", randt({2 * m, d}, rng));
      ps.add("k", randt({2 * m, d}, rng));
      ps.add("v", randt({2 * m, d}, rng));
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        auto y = t.attn_mha(t.param(*p.find("q")), t.param(*p.find("k")), t.param(*p.find("v")),
                            blocks, 2);
        return t.mean_all(t.mul_const(y, wts));
      }, "attn_mha");
    }
    {
      Params64 ps;
      ps.add("k", randt({2 * m, 1}, rng));
      ps.add("v", randt({2 * m, d}, rng));
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        auto y = t.attn_exp(t.param(*p.find("k")), t.param(*p.find("v")), blocks);
        return t.mean_all(t.mul_const(y, wts));
      }, "attn_exp");
    }
    {
      Params64 ps;
      ps.add("v", randt({2 * m, d}, rng));
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        return t.mean_all(t.mul_const(t.attn_uniform(t.param(*p.find("v")), blocks), wts));
      }, "attn_uniform");
    }
    {
      const int L = 1 + static_cast<int>(rng.below(3));
      Params64 ps;
      ps.add("q", randt({m, d}, rng));
      ps.add("k", randt({m * L, d}, rng));
      ps.add("v", randt({m * L, d}, rng));
      auto w2 = randt({m, d}, rng, 0.5, 1.5);
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        auto y = t.entity_attention(t.param(*p.find("q")), t.param(*p.find("k")),
                                    t.param(*p.find("v")), L);
        return t.mean_all(t.mul_const(y, w2));
      }, "entity_attention");
    }
  }
  // categorical heads and the loss tail
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    {
      Params64 ps;
      ps.add("z", randt({n, 5}, rng, -2, 2));
      std::vector<int> actions(n);
      for (auto& a : actions) a = static_cast<int>(rng.below(5));
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        return t.mean_all(t.action_log_prob(t.param(*p.find("z")), actions));
      }, "action_log_prob");
      Params64 ps2;
      ps2.add("z", randt({n, 5}, rng, -2, 2));
      fd_case(c, ps2, [&](Tape64& t, Params64& p) {
        return t.mean_all(t.entropy_rows(t.param(*p.find("z"))));
      }, "entropy_rows");
    }
    {
      Params64 ps;
      auto x = randt({n}, rng, -0.5, 0.5);
      for (auto& v : x.data)  // keep exp(x) clear of the clip kinks at 0.8/1.2
        while (std::abs(std::exp(v) - 0.8) < 1e-3 || std::abs(std::exp(v) - 1.2) < 1e-3)
          v = rng.uniform(-0.5, 0.5);
      ps.add("x", std::move(x));
      ps.add("y", randt({n}, rng));
      auto adv = randt({n}, rng);
      auto ret = randt({n}, rng);
      fd_case(c, ps, [&](Tape64& t, Params64& p) {
        auto ratio = t.exp_of(t.param(*p.find("x")));
        auto s1 = t.mul_const(ratio, adv);
        auto s2 = t.mul_const(t.clip(ratio, 0.8, 1.2), adv);
        auto pol = t.scale(t.mean_all(t.min2(s1, s2)), -1.0);
        auto vl = t.mean_all(t.square(t.sub_const(t.param(*p.find("y")), ret)));
        return t.add(pol, t.scale(vl, 0.5));
      }, "loss_tail");
    }
  }
  // the full log-prob / entropy / value pipeline, all three comm variants
  for (auto variant : {CommVariant::MHA, CommVariant::ExpKernel, CommVariant::Uniform}) {
    for (int trial = 0; trial < 4; ++trial) {
      PolicyConfig pc;
      pc.hidden = 8;
      pc.heads = 2;
      pc.hops = 2;
      pc.variant = variant;
      Rng prng(rng.next());
      PolicyNetT<double> net(pc, prng);
      for (size_t pi = 0; pi < net.params().size(); ++pi) {
        auto& par = net.params().at(pi);
        if (par.value.shape.size() == 1)  // biases
          for (auto& v : par.value.data) v = rng.uniform(0.02, 0.1);
      }
      const int m = 3, b = 2, L = 2;
      TensorT<double> own = randt({b * m, 4}, rng);
      TensorT<double> rel = randt({b * m * L, 2}, rng);
      AdjacencyMask chain(m);
      chain.set(0, 1, true);
      chain.set(1, 2, true);
      std::vector<AdjacencyMask> blocks = {chain, AdjacencyMask(m, true)};
      std::vector<int> actions(b * m);
      for (auto& a : actions) a = static_cast<int>(rng.below(5));
      fd_case(c, net.params(), [&](Tape64& t, Params64&) {
        auto ev = net.evaluate_actions(t, own, rel, L, blocks, actions);
        return t.add(t.mean_all(ev.log_probs),
                     t.add(t.scale(t.mean_all(ev.entropy), 0.3),
                           t.scale(t.mean_all(ev.values), 0.7)));
      }, "pipeline");
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d cases, %d coordinates vs central differences (h=1e-5, 64-bit), worst rel err %.2e",
                c.cases, c.coords, c.worst);
  report("gradient-correctness", c.ok && c.cases >= 100, detail);
}

// ---------------------------------------------------------------- hungarian

double brute_force_min(const std::vector<double>& cost, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0;
    for (int l = 0; l < n; ++l) total += cost[perm[l] * n + l];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void criterion_assignment() {
  Rng rng(7);
  bool ok = true;
  int checked = 0;
  for (int m = 2; m <= 7; ++m) {
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> cost(static_cast<size_t>(m) * m);
      for (auto& v : cost) v = rng.uniform(0, 10);
      const auto asg = hungarian(cost, m);
      if (asg.total_cost != brute_force_min(cost, m)) ok = false;
      ++checked;
    }
  }
  report("assignment-oracle", ok && checked == 3000,
         "hungarian == exhaustive minimum on 500 matrices per M in {2..7}, exact cost equality");
}

// ---------------------------------------------------------------- gae

void criterion_gae() {
  Rng rng(11);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int T = 1 + static_cast<int>(rng.below(10));
    RolloutBuffer buf;
    buf.allocate(T, 1, 2, 1);
    for (int t = 0; t < T; ++t) {
      buf.rewards[t] = static_cast<float>(rng.uniform(-1, 1));
      buf.dones[t] = rng.uniform() < 0.25 ? 1 : 0;
      for (int i = 0; i < 2; ++i)
        buf.values[buf.agent_index(t, 0, i)] = static_cast<float>(rng.uniform(-1, 1));
    }
    for (auto& b : buf.bootstrap) b = static_cast<float>(rng.uniform(-1, 1));
    const auto adv = compute_gae_f64(buf, 0.99, 0.95);
    for (int i = 0; i < 2; ++i) {
      for (int t0 = 0; t0 < T; ++t0) {
        double acc = 0.0, factor = 1.0;
        for (int t = t0; t < T; ++t) {
          const double nonterm = buf.dones[t] ? 0.0 : 1.0;
          const double nv = t + 1 < T ? buf.values[buf.agent_index(t + 1, 0, i)]
                                      : buf.bootstrap[i];
          const double delta =
              buf.rewards[t] + 0.99 * nv * nonterm - buf.values[buf.agent_index(t, 0, i)];
          acc += factor * delta;
          if (buf.dones[t]) break;
          factor *= 0.99 * 0.95;
        }
        const double err = std::abs(adv[buf.agent_index(t0, 0, i)] - acc);
        worst = std::max(worst, err);
        if (err > 1e-10) ok = false;
      }
    }
  }
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "recursion vs direct double sum on 1000 episodes <= 10 steps, worst |diff| %.2e",
                worst);
  report("gae-oracle", ok, detail);
}

// ------------------------------------------------- permutation equivariance

std::vector<Observation> random_obs(int m, int l, Rng& rng, double span = 2.0) {
  std::vector<Observation> obs(m);
  for (auto& o : obs) {
    for (auto& v : o.own) v = rng.uniform(-span, span);
    o.rel.resize(l);
    for (auto& r : o.rel) {
      r.x = rng.uniform(-span, span);
      r.y = rng.uniform(-span, span);
    }
  }
  return obs;
}

void criterion_permutation() {
  bool ok = true;
  double worst = 0.0;
  for (auto variant : {CommVariant::MHA, CommVariant::ExpKernel, CommVariant::Uniform}) {
    PolicyConfig pc;  // paper-size network
    pc.variant = variant;
    Rng prng(31 + static_cast<int>(variant));
    PolicyNet net(pc, prng);
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
      const int m = 3 + static_cast<int>(rng.below(3));
      const int l = 2 + static_cast<int>(rng.below(3));
      auto obs = random_obs(m, l, rng);
      AdjacencyMask mask(m);
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (rng.uniform() < 0.6) mask.set(i, j, true);
      const auto base = net.forward(obs, mask);

      // entity permutation: outputs move by at most 1e-5
      auto shuffled = obs;
      std::vector<int> eperm(l);
      std::iota(eperm.begin(), eperm.end(), 0);
      for (int i = l - 1; i > 0; --i) std::swap(eperm[i], eperm[rng.below(i + 1)]);
      for (int i = 0; i < m; ++i)
        for (int e = 0; e < l; ++e) shuffled[i].rel[e] = obs[i].rel[eperm[e]];
      const auto out_e = net.forward(shuffled, mask);
      for (int i = 0; i < m; ++i)
        for (int a = 0; a < 5; ++a)
          worst = std::max(worst, std::abs(static_cast<double>(out_e.logits.at(i, a)) -
                                           base.logits.at(i, a)));

      // joint agent permutation: rows permute identically
      std::vector<int> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
      std::vector<Observation> pobs(m);
      AdjacencyMask pmask(m);
      for (int i = 0; i < m; ++i) {
        pobs[i] = obs[perm[i]];
        for (int j = 0; j < m; ++j)
          if (i != j && mask.at(perm[i], perm[j])) pmask.set(i, j, true);
      }
      const auto out_p = net.forward(pobs, pmask);
      for (int i = 0; i < m; ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(out_p.values[i]) -
                                         base.values[perm[i]]));
        for (int a = 0; a < 5; ++a)
          worst = std::max(worst, std::abs(static_cast<double>(out_p.logits.at(i, a)) -
                                           base.logits.at(perm[i], a)));
      }
    }
  }
  ok = worst <= 1e-5;
  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "entity + joint-agent permutations across 3 variants, worst |delta| %.2e (tol 1e-5)",
                worst);
  report("permutation-equivariance", ok, detail);
}

// ------------------------------------------------------------- hop locality

void criterion_hop_locality() {
  PolicyConfig pc;  // C = 3 hops, paper size
  Rng prng(41);
  PolicyNet net(pc, prng);
  Rng rng(43);
  const int m = 5;
  auto obs = random_obs(m, 2, rng);
  AdjacencyMask chain(m);
  for (int i = 0; i + 1 < m; ++i) chain.set(i, i + 1, true);

  const auto base = net.forward(obs, chain);
  auto far = obs;
  far[0].own[0] += 0.75;
  far[0].own[3] -= 0.5;
  const auto out_far = net.forward(far, chain);
  bool far_identical = out_far.values[4] == base.values[4];
  for (int a = 0; a < 5; ++a)
    far_identical = far_identical && out_far.logits.at(4, a) == base.logits.at(4, a);

  auto nearp = obs;
  nearp[3].own[1] += 0.75;
  const auto out_near = net.forward(nearp, chain);
  bool near_changed = false;
  for (int a = 0; a < 5; ++a) near_changed |= out_near.logits.at(4, a) != base.logits.at(4, a);

  report("hop-locality", far_identical && near_changed,
         "5-agent chain, C=3: perturbing agent 0 leaves agent 4 bitwise unchanged, agent 3 does not");
}

// ------------------------------------------- decentralized execution

void criterion_decentralized() {
  bool ok = true;
  int trials = 0;
  for (auto variant : {CommVariant::MHA, CommVariant::ExpKernel, CommVariant::Uniform}) {
    PolicyConfig pc;
    pc.variant = variant;
    Rng prng(51 + static_cast<int>(variant));
    PolicyNet net(pc, prng);
    Rng rng(53);
    for (int trial = 0; trial < 6; ++trial) {
      const int m = 1 + static_cast<int>(rng.below(6));
      auto obs = random_obs(m, 3, rng);
      AdjacencyMask mask(m);
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (rng.uniform() < 0.5) mask.set(i, j, true);
      const auto a = net.forward(obs, mask);
      const auto b = net.forward_decentralized(obs, mask);
      ok = ok && a.logits.data == b.logits.data && a.values == b.values;
      ++trials;
    }
  }
  report("decentralized-equivalence", ok,
         "per-agent message-passing path == batched forward, bitwise, " + std::to_string(trials) +
             " random cases x 3 variants");
}

// -------------------------------------------------------- checkpointing

void criterion_checkpoint() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "swarmrl_acceptance_ckpt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  bool ok = true;
  std::string detail;

  RunConfig cfg = RunConfig::defaults_for(TaskKind::Coverage);
  cfg.seed = 5;
  Rng init(derive_seed(cfg.seed, stream::kParamInit));
  PolicyNet net(cfg.policy(), init);
  AdamState adam = AdamState::for_params(net.params());
  const auto path = (dir / "probe.bin").string();
  write_checkpoint(path, snapshot(cfg.to_text(), 7, net.params(), adam));
  const auto ck = read_checkpoint(path);
  RunConfig cfg2 = RunConfig::parse_text(ck.config_text);
  PolicyNet net2(cfg2.policy());
  load_params(net2.params(), ck.tensors);
  Rng rng(59);
  auto obs = random_obs(4, 4, rng);
  const auto a = net.forward(obs, AdjacencyMask(4, true));
  const auto b = net2.forward(obs, AdjacencyMask(4, true));
  ok = ok && a.logits.data == b.logits.data && a.values == b.values;
  detail = "save->load forward bitwise " + std::string(ok ? "equal" : "UNEQUAL");

  // curriculum transfer: stage checkpoints carry hash-equal tensors
  RunConfig ccfg = RunConfig::defaults_for(TaskKind::Coverage);
  ccfg.hidden = 16;
  ccfg.heads = 2;
  ccfg.ppo.n_envs = 2;
  ccfg.ppo.rollout_len = 8;
  ccfg.ppo.minibatches = 1;
  ccfg.stages = {2, 3};
  ccfg.stage_budget = 1;
  ccfg.eval_episodes = 1;
  ccfg.success_threshold = 0.0;  // transfer happens with zero updates
  Trainer trainer(ccfg, (dir / "curr").string());
  trainer.curriculum();
  const auto s2 = read_checkpoint((dir / "curr" / "ckpt_stage_m2.bin").string());
  const auto s3 = read_checkpoint((dir / "curr" / "ckpt_stage_m3.bin").string());
  bool hashes = s2.tensors.size() == s3.tensors.size();
  for (size_t i = 0; hashes && i < s2.tensors.size(); ++i)
    hashes = s2.tensors[i].second.data == s3.tensors[i].second.data;
  ok = ok && hashes;
  detail += "; curriculum stage tensors " + std::string(hashes ? "identical" : "DIFFER");
  report("checkpoint-round-trip", ok, detail);
}

// ------------------------------------------------------------ dropout

void criterion_dropout() {
  bool ok = true;
  AdjacencyMask full(6, true);  // 15 undirected edges
  DropoutSchedule sched(0.5, 10, Rng(61));
  const auto first = sched.apply(full, 0);
  const auto dropped0 = sched.dropped();
  ok = ok && dropped0.size() == 7;  // floor(0.5 * 15)
  int edges = 0;
  for (int i = 0; i < 6; ++i) {
    ok = ok && first.at(i, i);
    for (int j = i + 1; j < 6; ++j) {
      ok = ok && first.at(i, j) == first.at(j, i);
      edges += first.at(i, j) ? 1 : 0;
    }
  }
  ok = ok && edges == 8;
  for (int step = 1; step <= 9; ++step)
    ok = ok && sched.apply(full, step) == first && sched.dropped() == dropped0;
  sched.apply(full, 10);
  bool resampled = sched.dropped() != dropped0;
  for (int probe = 1; probe < 10 && !resampled; ++probe) {
    sched.apply(full, 10 * (probe + 1));
    resampled = sched.dropped() != dropped0;
  }
  ok = ok && resampled;
  report("dropout-schedule", ok,
         "floor(p*E)=7 of 15 symmetric off-diagonal edges dropped, constant for steps 0..9, resampled at 10");
}

// ------------------------------------------------- training reproductions

struct SeedOutcome {
  uint64_t seed;
  bool pass = false;
  int updates = -1;
  EvalSummary eval;
};

void print_outcome(const SeedOutcome& o, const char* extra = "") {
  std::printf("  seed %llu: %s after %d updates (success %.1f%%, mean steps %.1f, dist %.3f)%s\n",
              static_cast<unsigned long long>(o.seed), o.pass ? "PASS" : "fail", o.updates,
              o.eval.success_rate, o.eval.mean_steps, o.eval.avg_min_distance, extra);
  std::fflush(stdout);
}

// Runs up to three seeds, stopping once two pass (the criterion is then
// decided).
template <class RunSeed>
bool two_of_three(RunSeed&& run_seed) {
  const uint64_t seeds[3] = {101, 202, 303};
  int passes = 0, fails = 0;
  for (uint64_t seed : seeds) {
    SeedOutcome o = run_seed(seed);
    print_outcome(o);
    passes += o.pass ? 1 : 0;
    fails += o.pass ? 0 : 1;
    if (passes >= 2 || fails >= 2) break;
  }
  return passes >= 2;
}

RunConfig training_config(TaskKind task, int agents, CommMode comm, double bar) {
  RunConfig cfg = RunConfig::defaults_for(task);
  cfg.agents = agents;
  cfg.comm = comm;
  cfg.variant = CommVariant::MHA;
  cfg.max_updates = 2500;
  cfg.success_threshold = bar;
  return cfg;
}

void train_coverage_uc(const std::string& out_root) {
  const bool ok = two_of_three([&](uint64_t seed) {
    RunConfig cfg = training_config(TaskKind::Coverage, 3, CommMode::Unrestricted, 0.80);
    cfg.seed = seed;
    Trainer t(cfg, out_root + "/cov3_uc_s" + std::to_string(seed));
    const auto res = t.train();
    SeedOutcome o{seed, res.reached_threshold, res.reached_threshold ? res.updates_to_threshold
                                                                     : res.iterations_run,
                  res.last_eval};
    return o;
  });
  report("train-coverage-m3-uc-mha", ok, "success rate >= 80% within 2500 updates on >= 2 of 3 seeds");
}

void train_formation_uc(const std::string& out_root) {
  const bool ok = two_of_three([&](uint64_t seed) {
    RunConfig cfg = training_config(TaskKind::Formation, 3, CommMode::Unrestricted, 0.85);
    cfg.seed = seed;
    Trainer t(cfg, out_root + "/form3_uc_s" + std::to_string(seed));
    const auto res = t.train();
    SeedOutcome o{seed, res.reached_threshold, res.reached_threshold ? res.updates_to_threshold
                                                                     : res.iterations_run,
                  res.last_eval};
    return o;
  });
  report("train-formation-m3-uc-mha", ok, "success rate >= 85% within 2500 updates on >= 2 of 3 seeds");
}

void train_coverage_rc(const std::string& out_root) {
  const bool ok = two_of_three([&](uint64_t seed) {
    RunConfig cfg = training_config(TaskKind::Coverage, 3, CommMode::Restricted, 0.70);
    cfg.comm_radius = 2.0;  // R=2 in the 4x4 arena
    cfg.seed = seed;
    Trainer t(cfg, out_root + "/cov3_rc_s" + std::to_string(seed));
    const auto res = t.train();
    const bool pass = res.reached_threshold && res.last_eval.avg_min_distance <= 0.15;
    SeedOutcome o{seed, pass, res.reached_threshold ? res.updates_to_threshold
                                                    : res.iterations_run,
                  res.last_eval};
    return o;
  });
  report("train-coverage-m3-rc-mha", ok,
         "success >= 70% and avg_min_distance <= 0.15 within 2500 updates on >= 2 of 3 seeds");
}

void train_zeroshot(const std::string& out_root) {
  // one M=5 policy per seed; pass when both M=4 and M=6 keep >= 50% success
  const bool ok = two_of_three([&](uint64_t seed) {
    RunConfig cfg = training_config(TaskKind::Coverage, 5, CommMode::Unrestricted, 0.80);
    cfg.seed = seed;
    const std::string dir = out_root + "/cov5_uc_s" + std::to_string(seed);
    Trainer t(cfg, dir);
    const auto res = t.train();
    SeedOutcome o{seed, false, res.reached_threshold ? res.updates_to_threshold
                                                     : res.iterations_run,
                  res.last_eval};
    if (!res.reached_threshold) {
      print_outcome(o, " [base policy below 80%, zero-shot not attempted]");
      o.pass = false;
      return o;
    }
    const auto rows = zeroshot(dir + "/ckpt_final.bin", -1, 1, 30, dir + "/zeroshot.csv", seed);
    const double at4 = rows[0].eval.success_rate;
    const double at6 = rows[2].eval.success_rate;
    std::printf("  seed %llu zero-shot: M=4 %.1f%%, M=6 %.1f%%\n",
                static_cast<unsigned long long>(seed), at4, at6);
    o.pass = at4 >= 50.0 && at6 >= 50.0;
    return o;
  });
  report("train-zeroshot-coverage-uc", ok,
         "M=5 policy keeps >= 50% success at M=4 and M=6 with no fine-tuning on >= 2 of 3 seeds");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "properties";
  std::string out_root = "acceptance_runs";
  for (int i = 2; i + 1 < argc; i += 2)
    if (std::strcmp(argv[i], "--out") == 0) out_root = argv[i + 1];

  if (mode == "properties") {
    criterion_gradients();
    criterion_assignment();
    criterion_gae();
    criterion_permutation();
    criterion_hop_locality();
    criterion_decentralized();
    criterion_checkpoint();
    criterion_dropout();
  } else if (mode == "train-coverage-uc") {
    train_coverage_uc(out_root);
  } else if (mode == "train-formation-uc") {
    train_formation_uc(out_root);
  } else if (mode == "train-coverage-rc") {
    train_coverage_rc(out_root);
  } else if (mode == "train-zeroshot") {
    train_zeroshot(out_root);
  } else {
    std::fprintf(stderr,
                 "usage: %s [properties|train-coverage-uc|train-formation-uc|train-coverage-rc|"
                 "train-zeroshot] [--out DIR]\n",
                 argv[0]);
    return 2;
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
