// Command-line front end for the swarmrl shared library. Talks to the core
// exclusively through the C API in swarmrl.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmrl.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string task = "coverage";
  std::vector<std::string> sets;
  uint64_t seed = 0;
  bool has_seed = false;
  int threads = 1;
  bool deterministic = false;
};

int die(srl_status st, const char* what) {
  std::fprintf(stderr, "swarmctl: %s failed: %s", what, srl_status_name(st));
  const char* detail = srl_last_error();
  if (detail && detail[0]) std::fprintf(stderr, " (%s)", detail);
  std::fprintf(stderr, "\n");
  return 1;
}

srl_run_options run_options(const CommonOpts& c) {
  srl_run_options o{};
  o.seed = c.seed;
  o.has_seed = c.has_seed ? 1 : 0;
  o.threads = c.threads;
  o.deterministic = c.deterministic ? 1 : 0;
  return o;
}

// Builds the config from --config / --task plus --set key=value overrides.
srl_status make_config(const CommonOpts& c, srl_config** out) {
  srl_status st = c.config_path.empty() ? srl_config_create(c.task.c_str(), out)
                                        : srl_config_load(c.config_path.c_str(), out);
  if (st != SRL_OK) return st;
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      srl_config_destroy(*out);
      *out = nullptr;
      std::fprintf(stderr, "swarmctl: --set expects key=value, got '%s'\n", kv.c_str());
      return SRL_ERR_INVALID_ARGUMENT;
    }
    st = srl_config_set(*out, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != SRL_OK) {
      srl_config_destroy(*out);
      *out = nullptr;
      return st;
    }
  }
  return SRL_OK;
}

void add_common(CLI::App* cmd, CommonOpts& c, bool with_config) {
  if (with_config) {
    cmd->add_option("--config", c.config_path, "Config file (key = value sections)");
    cmd->add_option("--task", c.task, "Task defaults when no --config: coverage|formation|line");
    cmd->add_option("--set", c.sets, "Override a config key, e.g. --set ppo.lr=3e-4")
        ->take_all();
  }
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)")
      ->each([&c](const std::string&) { c.has_seed = true; });
  cmd->add_option("--threads", c.threads, "Rollout worker threads");
  cmd->add_flag("--deterministic", c.deterministic, "Force single-threaded execution");
}

void print_summary(const srl_eval_summary& s, int agents) {
  if (agents > 0) std::printf("agents              %d\n", agents);
  std::printf("episodes            %d\n", s.episodes);
  std::printf("success_rate        %.1f%%\n", s.success_rate);
  std::printf("mean_steps          %.2f\n", s.mean_steps);
  if (s.avg_min_distance >= 0) std::printf("avg_min_distance    %.4f\n", s.avg_min_distance);
  std::printf("mean_final_reward   %.4f\n", s.mean_final_reward);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmrl: decentralized swarm policy training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(srl_version()));

  CommonOpts train_c, curr_c, eval_c, zero_c;

  auto* train = app.add_subcommand("train", "Train a policy");
  add_common(train, train_c, true);
  train->add_option("--out", train_c.out_dir, "Output directory")->required();

  auto* curriculum = app.add_subcommand("curriculum", "Staged training over team sizes");
  add_common(curriculum, curr_c, true);
  curriculum->add_option("--out", curr_c.out_dir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string eval_ckpt, eval_traj;
  int eval_episodes = 30, eval_agents = 0;
  bool eval_sample = false;
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval->add_option("--episodes", eval_episodes, "Evaluation episodes");
  eval->add_option("--agents", eval_agents, "Override the team size");
  eval->add_option("--trajectory", eval_traj, "Write a trajectory csv");
  eval->add_flag("--sample", eval_sample, "Sample actions instead of greedy selection");
  add_common(eval, eval_c, false);

  auto* zeroshot = app.add_subcommand("zeroshot", "Evaluate across team sizes, no fine-tuning");
  std::string zero_ckpt, zero_table;
  int zero_min = -2, zero_max = 2, zero_episodes = 30;
  zeroshot->add_option("--checkpoint", zero_ckpt, "Checkpoint file")->required();
  zeroshot->add_option("--delta-min", zero_min, "Smallest team-size delta");
  zeroshot->add_option("--delta-max", zero_max, "Largest team-size delta");
  zeroshot->add_option("--episodes", zero_episodes, "Episodes per team size");
  zeroshot->add_option("--out", zero_table, "Write the table csv here");
  add_common(zeroshot, zero_c, false);

  auto* render = app.add_subcommand("render", "Render trajectory csv to SVG");
  std::string render_traj, render_out;
  render->add_option("--trajectory", render_traj, "Trajectory csv")->required();
  render->add_option("--out", render_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed() || curriculum->parsed()) {
    const bool is_train = train->parsed();
    CommonOpts& c = is_train ? train_c : curr_c;
    srl_config* cfg = nullptr;
    srl_status st = make_config(c, &cfg);
    if (st != SRL_OK) return die(st, "config");
    const auto opts = run_options(c);
    st = is_train ? srl_train(cfg, c.out_dir.c_str(), &opts)
                  : srl_curriculum(cfg, c.out_dir.c_str(), &opts);
    srl_config_destroy(cfg);
    if (st != SRL_OK) return die(st, is_train ? "train" : "curriculum");
    std::printf("done; outputs in %s\n", c.out_dir.c_str());
    return 0;
  }

  if (eval->parsed()) {
    const auto opts = run_options(eval_c);
    srl_eval_summary summary{};
    const srl_status st =
        srl_eval(eval_ckpt.c_str(), eval_episodes, eval_sample ? 0 : 1, eval_agents,
                 eval_traj.empty() ? nullptr : eval_traj.c_str(), &opts, &summary);
    if (st != SRL_OK) return die(st, "eval");
    print_summary(summary, eval_agents);
    return 0;
  }

  if (zeroshot->parsed()) {
    const auto opts = run_options(zero_c);
    const int cap = zero_max - zero_min + 1;
    std::vector<srl_zeroshot_row> rows(static_cast<size_t>(cap > 0 ? cap : 0));
    int n = 0;
    const srl_status st =
        srl_zeroshot(zero_ckpt.c_str(), zero_min, zero_max, zero_episodes,
                     zero_table.empty() ? nullptr : zero_table.c_str(), &opts, rows.data(), cap,
                     &n);
    if (st != SRL_OK) return die(st, "zeroshot");
    std::printf("%-6s %-7s %-9s %-10s %-14s\n", "delta", "agents", "success%", "mean_steps",
                "final_reward");
    for (int i = 0; i < n; ++i) {
      if (rows[i].skipped) {
        std::printf("%-6d %-7d skipped (team size < 1)\n", rows[i].delta, rows[i].agents);
        continue;
      }
      std::printf("%-6d %-7d %-9.1f %-10.2f %-14.4f\n", rows[i].delta, rows[i].agents,
                  rows[i].eval.success_rate, rows[i].eval.mean_steps,
                  rows[i].eval.mean_final_reward);
    }
    return 0;
  }

  if (render->parsed()) {
    int n = 0;
    const srl_status st = srl_render(render_traj.c_str(), render_out.c_str(), &n);
    if (st != SRL_OK) return die(st, "render");
    std::printf("rendered %d episode(s) into %s\n", n, render_out.c_str());
    return 0;
  }

  return 0;
}
