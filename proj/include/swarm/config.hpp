#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarm/env.hpp"
#include "swarm/policy.hpp"
#include "swarm/ppo.hpp"
#include "swarm/rollout.hpp"

namespace swarm {

// One experiment's full configuration. Serialized as line-oriented
// `key = value` text under `[section]` headers; every key has the paper's
// value as its default. Setting `run.task` re-applies the task's dependent
// defaults (arena size, communication radius), so task selection should
// come before overrides of those keys.
struct RunConfig {
  // [run]
  TaskKind task = TaskKind::Coverage;
  int agents = 3;
  CommMode comm = CommMode::Unrestricted;
  double comm_radius = 2.0;
  CommVariant variant = CommVariant::MHA;
  bool dropout = false;
  double dropout_p = 0.5;
  int dropout_period = 10;
  bool dropout_in_eval = false;
  uint64_t seed = 0;

  // [policy]
  int hidden = 128;
  int hops = 3;
  int heads = 4;
  bool tied_hops = false;

  // [env]
  double arena_half_width = 2.0;
  double accel_scale = 5.0;
  double dt = 0.1;
  double damping = 0.5;
  int horizon = 50;

  // [task]
  TaskConfig task_cfg;

  // [ppo]
  PpoConfig ppo;

  // [train]
  int max_updates = 2500;
  int eval_every = 50;
  int eval_episodes = 30;
  double success_threshold = 0.85;

  // [curriculum]
  std::vector<int> stages = {3, 5, 7, 10};
  int stage_budget = 5000;

  static RunConfig defaults_for(TaskKind kind);
  static RunConfig parse_text(const std::string& text);
  static RunConfig parse_file(const std::string& path);

  // Key paths are "section.key", e.g. "ppo.lr".
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  // Canonical serialization; parse_text(to_text()) round-trips.
  std::string to_text() const;

  void validate() const;

  WorldConfig world() const;
  TaskConfig task_config() const;
  CommConfig comm_config() const;
  PolicyConfig policy() const;

  // Derived landmark count for the configured task and team size.
  int landmarks() const { return landmarks_for(task, agents); }
};

const char* task_name(TaskKind k);
TaskKind task_from_name(const std::string& s);
CommVariant variant_from_name(const std::string& s);

}  // namespace swarm
