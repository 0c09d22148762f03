#pragma once

#include <optional>
#include <string>
#include <vector>

#include "swarm/checkpoint.hpp"
#include "swarm/config.hpp"
#include "swarm/metrics.hpp"
#include "swarm/policy.hpp"
#include "swarm/ppo.hpp"

namespace swarm {

struct EvalSummary {
  double success_rate = 0.0;      // percent of episodes reaching the goal
  double mean_steps = 0.0;        // steps to success; failures count the horizon
  double avg_min_distance = -1.0; // coverage only (at episode end), -1 otherwise
  double mean_final_reward = 0.0; // shared reward at the final step
  int episodes = 0;
};

struct EvalOptions {
  int episodes = 30;
  bool greedy = true;
  uint64_t seed = 1;
  std::string trajectory_path;  // empty: no export
};

// Runs freshly seeded episodes with decentralized action selection.
// Never touches parameters or optimizer state.
EvalSummary evaluate_policy(const PolicyNet& net, const RunConfig& cfg, const EvalOptions& opt);

struct TrainResult {
  int iterations_run = 0;
  bool reached_threshold = false;
  int updates_to_threshold = -1;
  EvalSummary last_eval;
};

struct CurriculumStage {
  int agents = 0;
  int updates_used = 0;
  bool reached = false;
  double success_rate = 0.0;
};

// Experiment driver: owns the output directory, metrics stream and
// checkpoint files for one run.
class Trainer {
 public:
  Trainer(RunConfig cfg, std::string out_dir, int threads = 1);

  // Trains until train.max_updates or the success threshold, evaluating
  // every train.eval_every updates. Writes metrics.csv, ckpt_init.bin,
  // ckpt_latest.bin, ckpt_final.bin.
  TrainResult train();

  // Staged training over curriculum.stages team sizes; parameters transfer
  // unchanged between stages, the optimizer restarts. Writes per-stage
  // checkpoints (ckpt_stage_m<M>.bin) and curriculum.csv.
  std::vector<CurriculumStage> curriculum();

  const RunConfig& config() const { return cfg_; }

 private:
  TrainResult run_stage(PolicyNet& net, int stage_agents, int budget, MetricsWriter& metrics,
                        int64_t& iteration, int& eval_counter, double t0,
                        const std::string& final_ckpt_name);

  void save(const std::string& name, const RunConfig& cfg, const PolicyNet& net,
            const AdamState& adam, uint64_t iteration,
            const std::vector<std::pair<std::string, std::array<uint64_t, 4>>>& rng) const;

  RunConfig cfg_;
  std::string out_dir_;
  int threads_;
};

// Loads a checkpoint, rebuilds the network it describes and evaluates it.
// agents_override <= 0 keeps the training-time team size; otherwise the
// world is rebuilt at the new size (count-invariant parameters).
EvalSummary eval_checkpoint(const std::string& checkpoint_path, int episodes, bool greedy,
                            int agents_override, const std::string& trajectory_path,
                            std::optional<uint64_t> seed);

struct ZeroshotRow {
  int delta = 0;
  int agents = 0;
  bool skipped = false;  // team size < 1
  EvalSummary eval;
};

// Evaluates a trained checkpoint at team sizes M+delta for each delta in
// [delta_min, delta_max], no fine-tuning. Optionally writes a csv table.
std::vector<ZeroshotRow> zeroshot(const std::string& checkpoint_path, int delta_min,
                                  int delta_max, int episodes, const std::string& table_path,
                                  std::optional<uint64_t> seed);

}  // namespace swarm
