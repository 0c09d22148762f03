#pragma once

#include <vector>

#include "swarm/env.hpp"

namespace swarm {

// Minimum-cost perfect matching between agents and landmarks.
// agent_of_landmark[l] is the agent assigned to landmark l; total_cost is
// the minimal sum of cost(agent_of_landmark[l], l).
struct Assignment {
  std::vector<int> agent_of_landmark;
  double total_cost = 0.0;
};

// Solves linear sum assignment on a square cost matrix (row-major,
// cost[a*n + l] = cost of pairing agent a with landmark l) by shortest
// augmenting paths, O(n^3). Throws on non-finite entries or a size mismatch.
Assignment hungarian(const std::vector<double>& cost, int n);

// Shared team rewards. All are <= 0 and equal 0 exactly at the task's ideal
// configuration.
double coverage_reward(const EnvState& s, const TaskConfig& tc);
double formation_reward(const EnvState& s, const TaskConfig& tc);
double line_reward(const EnvState& s, const TaskConfig& tc);

bool coverage_success(const EnvState& s, const TaskConfig& tc);
bool formation_success(const EnvState& s, const TaskConfig& tc);
bool line_success(const EnvState& s, const TaskConfig& tc);

double task_reward(const EnvState& s, const TaskConfig& tc);
bool task_success(const EnvState& s, const TaskConfig& tc);

// Mean distance of each landmark to its nearest agent (no matching, no
// clipping). The coverage-control evaluation metric.
double avg_min_distance(const EnvState& s);

// M equally spaced points on the segment [a, b], endpoints included.
// A single agent targets the midpoint.
std::vector<Vec2> line_targets(const Vec2& a, const Vec2& b, int m);

// Sorted consecutive angular gaps of the agents about a center, length M,
// summing to 2*pi. A single agent yields one gap of 2*pi.
std::vector<double> circular_gaps(const EnvState& s, const Vec2& center);

struct EpisodeMetrics {
  bool success = false;
  int steps = 0;
  double avg_min_distance = -1.0;  // coverage only
  double final_reward = 0.0;
};

}  // namespace swarm
