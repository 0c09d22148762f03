#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "swarm/env.hpp"

namespace swarm {

// One metrics row per training iteration. Evaluation-derived fields carry
// the most recent evaluation's results.
struct MetricsRow {
  int64_t iteration = 0;
  double wall_time_s = 0.0;  // excluded from reproducibility comparisons
  int agents = 0;
  double mean_episode_reward = 0.0;  // completed training episodes this iteration
  double success_rate = 0.0;         // percent, greedy evaluation
  double mean_episode_length = 0.0;  // greedy evaluation; failures count the horizon
  double avg_min_distance = -1.0;    // coverage only, -1 otherwise
  double loss = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Append-only comma-separated metrics stream with one header line.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void write(const MetricsRow& row);
  static const char* header();

 private:
  std::ofstream out_;
};

// Trajectory export: one row per (episode, step, agent) plus one row per
// (episode, -1, landmark) carrying its position. The leading comment line
// records the arena half-width for the renderer.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::string& path, double arena_half_width);
  void begin_episode(int episode, const std::vector<Vec2>& landmarks);
  void step_row(int episode, int step, int agent, const Vec2& pos, const Vec2& vel, int action,
                double reward);

 private:
  std::ofstream out_;
};

struct TrajectoryPoint {
  int step;
  double px, py, vx, vy;
  int action;
  double reward;
};

struct TrajectoryEpisode {
  int episode = 0;
  std::vector<Vec2> landmarks;
  std::vector<std::vector<TrajectoryPoint>> agents;  // per agent, by step
};

struct TrajectoryFile {
  double arena_half_width = 0.0;  // 0 means absent; renderer falls back to extents
  std::vector<TrajectoryEpisode> episodes;
};

TrajectoryFile read_trajectory(const std::string& path);

}  // namespace swarm
