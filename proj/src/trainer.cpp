#include "swarm/trainer.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "swarm/render.hpp"
#include "swarm/tasks.hpp"

namespace swarm {

namespace {

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

RunConfig sized(const RunConfig& base, int agents) {
  RunConfig cfg = base;
  cfg.agents = agents;
  return cfg;
}

}  // namespace

EvalSummary evaluate_policy(const PolicyNet& net, const RunConfig& cfg, const EvalOptions& opt) {
  EvalSummary sum;
  sum.episodes = opt.episodes;
  EnvPool pool(cfg.world(), cfg.task_config(), cfg.comm_config(), opt.seed, 1);
  Rng sample_rng(derive_seed(opt.seed, stream::kAction));
  std::unique_ptr<TrajectoryWriter> traj;
  if (!opt.trajectory_path.empty())
    traj = std::make_unique<TrajectoryWriter>(opt.trajectory_path, cfg.arena_half_width);

  int successes = 0;
  double steps_sum = 0, dist_sum = 0, final_reward_sum = 0;
  for (int ep = 0; ep < opt.episodes; ++ep) {
    if (ep > 0) pool.reset_env(0);
    Env& env = pool.env(0);
    if (traj) {
      traj->begin_episode(ep, env.state().landmarks);
      for (int i = 0; i < cfg.agents; ++i)
        traj->step_row(ep, 0, i, env.state().pos[i], env.state().vel[i], 0, 0.0);
    }
    double reward = 0.0;
    while (!env.state().done) {
      const auto obs = env.observe();
      const auto mask = pool.mask_for(0, /*training=*/false);
      const auto fo = net.forward(obs, mask);
      const auto acts = opt.greedy ? PolicyNet::greedy_actions(fo.logits)
                                   : PolicyNet::sample_actions(fo.logits, sample_rng);
      reward = env.step(acts);
      if (traj)
        for (int i = 0; i < cfg.agents; ++i)
          traj->step_row(ep, env.state().step, i, env.state().pos[i], env.state().vel[i],
                         acts[i], reward);
    }
    successes += env.state().success ? 1 : 0;
    steps_sum += env.state().step;  // failures terminate at the horizon
    final_reward_sum += reward;
    if (cfg.task == TaskKind::Coverage) dist_sum += avg_min_distance(env.state());
  }
  sum.success_rate = 100.0 * successes / opt.episodes;
  sum.mean_steps = steps_sum / opt.episodes;
  sum.mean_final_reward = final_reward_sum / opt.episodes;
  sum.avg_min_distance = cfg.task == TaskKind::Coverage ? dist_sum / opt.episodes : -1.0;
  return sum;
}

Trainer::Trainer(RunConfig cfg, std::string out_dir, int threads)
    : cfg_(std::move(cfg)), out_dir_(std::move(out_dir)), threads_(threads < 1 ? 1 : threads) {
  cfg_.validate();
  std::filesystem::create_directories(out_dir_);
}

void Trainer::save(const std::string& name, const RunConfig& cfg, const PolicyNet& net,
                   const AdamState& adam, uint64_t iteration,
                   const std::vector<std::pair<std::string, std::array<uint64_t, 4>>>& rng) const {
  Checkpoint ck = snapshot(cfg.to_text(), iteration, net.params(), adam);
  ck.rng_states = rng;
  write_checkpoint((std::filesystem::path(out_dir_) / name).string(), ck);
}

TrainResult Trainer::run_stage(PolicyNet& net, int stage_agents, int budget,
                               MetricsWriter& metrics, int64_t& iteration, int& eval_counter,
                               double t0, const std::string& final_ckpt_name) {
  const RunConfig cfg = sized(cfg_, stage_agents);
  const uint64_t stage_salt = derive_seed(cfg_.seed, 0x100 + stage_agents);
  EnvPool pool(cfg.world(), cfg.task_config(), cfg.comm_config(), stage_salt, cfg.ppo.n_envs);
  PpoDriver driver(net, cfg.ppo, stage_salt);
  const uint64_t eval_base = derive_seed(cfg_.seed, stream::kEval);

  auto run_eval = [&] {
    EvalOptions opt;
    opt.episodes = cfg.eval_episodes;
    opt.greedy = true;
    opt.seed = derive_seed(eval_base, eval_counter++);
    return evaluate_policy(net, cfg, opt);
  };
  auto rng_entries = [&] {
    std::vector<std::pair<std::string, std::array<uint64_t, 4>>> out;
    const auto states = pool.rng_states();
    const size_t n = states.size() / 3;
    for (size_t i = 0; i < states.size(); ++i) {
      const char* kind = i < n ? "env_init." : i < 2 * n ? "action." : "dropout.";
      out.emplace_back(kind + std::to_string(i % n), states[i]);
    }
    out.emplace_back("shuffle", driver.shuffle_rng().state());
    out.emplace_back("eval_counter",
                     std::array<uint64_t, 4>{static_cast<uint64_t>(eval_counter), 0, 0, 0});
    return out;
  };

  TrainResult result;
  result.last_eval = run_eval();
  if (result.last_eval.success_rate >= 100.0 * cfg.success_threshold) {
    result.reached_threshold = true;
    result.updates_to_threshold = 0;
  }
  for (int it = 1; it <= budget && !result.reached_threshold; ++it) {
    const auto stats = driver.train_iteration(pool, threads_);
    ++iteration;
    const bool eval_now = it % cfg.eval_every == 0;
    if (eval_now) {
      result.last_eval = run_eval();
      save("ckpt_latest.bin", cfg, net, driver.adam(), static_cast<uint64_t>(iteration),
           rng_entries());
    }
    MetricsRow row;
    row.iteration = iteration;
    row.wall_time_s = now_s() - t0;
    row.agents = stage_agents;
    row.mean_episode_reward = stats.rollout.mean_episode_return;
    row.success_rate = result.last_eval.success_rate;
    row.mean_episode_length = result.last_eval.mean_steps;
    row.avg_min_distance = result.last_eval.avg_min_distance;
    row.loss = stats.update.loss;
    row.policy_loss = stats.update.policy_loss;
    row.value_loss = stats.update.value_loss;
    row.entropy = stats.update.entropy;
    row.clip_fraction = stats.update.clip_fraction;
    metrics.write(row);
    result.iterations_run = it;
    if (eval_now && result.last_eval.success_rate >= 100.0 * cfg.success_threshold) {
      result.reached_threshold = true;
      result.updates_to_threshold = it;
    }
  }
  save(final_ckpt_name, cfg, net, driver.adam(), static_cast<uint64_t>(iteration),
       rng_entries());
  return result;
}

TrainResult Trainer::train() {
  const double t0 = now_s();
  Rng init_rng(derive_seed(cfg_.seed, stream::kParamInit));
  PolicyNet net(cfg_.policy(), init_rng);
  {
    std::ofstream cfg_out(std::filesystem::path(out_dir_) / "config.ini");
    cfg_out << cfg_.to_text();
  }
  MetricsWriter metrics((std::filesystem::path(out_dir_) / "metrics.csv").string());
  AdamState init_adam = AdamState::for_params(net.params());
  save("ckpt_init.bin", cfg_, net, init_adam, 0, {});
  int64_t iteration = 0;
  int eval_counter = 0;
  TrainResult result;
  if (cfg_.max_updates > 0) {
    result = run_stage(net, cfg_.agents, cfg_.max_updates, metrics, iteration, eval_counter, t0,
                       "ckpt_final.bin");
  } else {
    save("ckpt_final.bin", cfg_, net, init_adam, 0, {});
  }
  return result;
}

std::vector<CurriculumStage> Trainer::curriculum() {
  if (cfg_.stages.empty()) throw std::invalid_argument("curriculum: stage list is empty");
  const double t0 = now_s();
  Rng init_rng(derive_seed(cfg_.seed, stream::kParamInit));
  PolicyNet net(cfg_.policy(), init_rng);
  {
    std::ofstream cfg_out(std::filesystem::path(out_dir_) / "config.ini");
    cfg_out << cfg_.to_text();
  }
  MetricsWriter metrics((std::filesystem::path(out_dir_) / "metrics.csv").string());
  AdamState init_adam = AdamState::for_params(net.params());
  save("ckpt_init.bin", cfg_, net, init_adam, 0, {});

  std::vector<CurriculumStage> out;
  int64_t iteration = 0;
  int eval_counter = 0;
  for (int m : cfg_.stages) {
    auto res = run_stage(net, m, cfg_.stage_budget, metrics, iteration, eval_counter, t0,
                         "ckpt_stage_m" + std::to_string(m) + ".bin");
    CurriculumStage st;
    st.agents = m;
    st.updates_used = res.reached_threshold ? res.updates_to_threshold : res.iterations_run;
    st.reached = res.reached_threshold;
    st.success_rate = res.last_eval.success_rate;
    out.push_back(st);
    if (!st.reached) break;  // stage failed within its budget: report and stop
  }
  std::ofstream table(std::filesystem::path(out_dir_) / "curriculum.csv");
  table << "agents,updates_used,reached,success_rate\n";
  for (const auto& st : out)
    table << st.agents << ',' << st.updates_used << ',' << (st.reached ? 1 : 0) << ','
          << st.success_rate << "\n";
  return out;
}

namespace {

PolicyNet net_from_checkpoint(const Checkpoint& ck, RunConfig& cfg_out) {
  cfg_out = RunConfig::parse_text(ck.config_text);
  PolicyNet net(cfg_out.policy());
  load_params(net.params(), ck.tensors);
  return net;
}

}  // namespace

EvalSummary eval_checkpoint(const std::string& checkpoint_path, int episodes, bool greedy,
                            int agents_override, const std::string& trajectory_path,
                            std::optional<uint64_t> seed) {
  const Checkpoint ck = read_checkpoint(checkpoint_path);
  RunConfig cfg;
  PolicyNet net = net_from_checkpoint(ck, cfg);
  if (agents_override > 0) cfg.agents = agents_override;
  EvalOptions opt;
  opt.episodes = episodes;
  opt.greedy = greedy;
  opt.seed = seed.value_or(derive_seed(derive_seed(cfg.seed, stream::kEval), 0xE7A1));
  opt.trajectory_path = trajectory_path;
  return evaluate_policy(net, cfg, opt);
}

std::vector<ZeroshotRow> zeroshot(const std::string& checkpoint_path, int delta_min,
                                  int delta_max, int episodes, const std::string& table_path,
                                  std::optional<uint64_t> seed) {
  if (delta_min > delta_max) throw std::invalid_argument("zeroshot: empty delta range");
  const Checkpoint ck = read_checkpoint(checkpoint_path);
  RunConfig cfg;
  PolicyNet net = net_from_checkpoint(ck, cfg);
  const int base = cfg.agents;
  const uint64_t eval_base = seed.value_or(derive_seed(derive_seed(cfg.seed, stream::kEval), 0x25));
  std::vector<ZeroshotRow> rows;
  for (int delta = delta_min; delta <= delta_max; ++delta) {
    ZeroshotRow row;
    row.delta = delta;
    row.agents = base + delta;
    if (row.agents < 1) {
      row.skipped = true;  // no team of that size
      rows.push_back(row);
      continue;
    }
    RunConfig ecfg = sized(cfg, row.agents);
    EvalOptions opt;
    opt.episodes = episodes;
    opt.greedy = true;
    opt.seed = derive_seed(eval_base, static_cast<uint64_t>(delta + 1000));
    row.eval = evaluate_policy(net, ecfg, opt);
    rows.push_back(row);
  }
  if (!table_path.empty()) {
    std::ofstream table(table_path);
    if (!table) throw std::runtime_error("zeroshot: cannot write '" + table_path + "'");
    table << "delta,agents,skipped,success_rate,mean_steps,avg_min_distance,mean_final_reward\n";
    for (const auto& r : rows)
      table << r.delta << ',' << r.agents << ',' << (r.skipped ? 1 : 0) << ','
            << r.eval.success_rate << ',' << r.eval.mean_steps << ',' << r.eval.avg_min_distance
            << ',' << r.eval.mean_final_reward << "\n";
  }
  return rows;
}

}  // namespace swarm
