#include "swarm/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarm {

Assignment hungarian(const std::vector<double>& cost, int n) {
  if (n < 1) throw std::invalid_argument("hungarian: empty matrix");
  if (static_cast<int>(cost.size()) != n * n)
    throw std::invalid_argument("hungarian: cost matrix is not square of the given size");
  for (double c : cost)
    if (!std::isfinite(c)) throw std::invalid_argument("hungarian: non-finite cost entry");

  // Shortest augmenting path formulation with potentials (1-indexed).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> assigned_row(n + 1, 0);  // column j -> row
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    assigned_row[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = assigned_row[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[assigned_row[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (assigned_row[j0] != 0);
    do {
      const int j1 = way[j0];
      assigned_row[j0] = assigned_row[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment out;
  out.agent_of_landmark.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.agent_of_landmark[j - 1] = assigned_row[j] - 1;
  for (int l = 0; l < n; ++l) out.total_cost += cost[out.agent_of_landmark[l] * n + l];
  return out;
}

namespace {

std::vector<double> distance_matrix(const std::vector<Vec2>& agents,
                                    const std::vector<Vec2>& targets) {
  const int n = static_cast<int>(agents.size());
  std::vector<double> cost(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int l = 0; l < n; ++l) cost[a * n + l] = dist(agents[a], targets[l]);
  return cost;
}

double matched_mean_clipped(const std::vector<Vec2>& agents, const std::vector<Vec2>& targets,
                            double clip) {
  const int n = static_cast<int>(agents.size());
  const auto cost = distance_matrix(agents, targets);
  const auto asg = hungarian(cost, n);
  double sum = 0.0;
  for (int l = 0; l < n; ++l) sum += std::min(cost[asg.agent_of_landmark[l] * n + l], clip);
  return sum / n;
}

bool every_target_covered(const std::vector<Vec2>& agents, const std::vector<Vec2>& targets,
                          double threshold) {
  for (const auto& t : targets) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : agents) best = std::min(best, dist(a, t));
    if (best > threshold) return false;
  }
  return true;
}

}  // namespace

double coverage_reward(const EnvState& s, const TaskConfig& tc) {
  if (s.pos.size() != s.landmarks.size())
    throw std::invalid_argument("coverage: needs as many landmarks as agents");
  return -matched_mean_clipped(s.pos, s.landmarks, tc.distance_clip);
}

bool coverage_success(const EnvState& s, const TaskConfig& tc) {
  return every_target_covered(s.pos, s.landmarks, tc.cover_threshold);
}

std::vector<double> circular_gaps(const EnvState& s, const Vec2& center) {
  const int m = static_cast<int>(s.pos.size());
  std::vector<double> angles(m);
  for (int i = 0; i < m; ++i)
    angles[i] = std::atan2(s.pos[i].y - center.y, s.pos[i].x - center.x);
  std::sort(angles.begin(), angles.end());
  std::vector<double> gaps(m);
  const double two_pi = 2.0 * M_PI;
  for (int i = 0; i + 1 < m; ++i) gaps[i] = angles[i + 1] - angles[i];
  gaps[m - 1] = two_pi - (angles[m - 1] - angles[0]);
  if (m == 1) gaps[0] = two_pi;
  return gaps;
}

double formation_reward(const EnvState& s, const TaskConfig& tc) {
  if (s.landmarks.size() != 1)
    throw std::invalid_argument("formation: needs exactly one landmark");
  const Vec2 lm = s.landmarks[0];
  const int m = static_cast<int>(s.pos.size());

  double radial = 0.0;
  for (const auto& p : s.pos)
    radial += std::min(std::abs(dist(p, lm) - tc.formation_radius), tc.distance_clip);
  radial /= m;

  const double target_gap = 2.0 * M_PI / m;
  double angular = 0.0;
  for (double g : circular_gaps(s, lm)) angular += std::abs(g - target_gap);
  angular /= m;

  return -radial - angular / M_PI;
}

bool formation_success(const EnvState& s, const TaskConfig& tc) {
  const Vec2 lm = s.landmarks[0];
  for (const auto& p : s.pos)
    if (std::abs(dist(p, lm) - tc.formation_radius) > tc.radial_tolerance) return false;
  const int m = static_cast<int>(s.pos.size());
  const double target_gap = 2.0 * M_PI / m;
  for (double g : circular_gaps(s, lm))
    if (std::abs(g - target_gap) > tc.angular_tolerance) return false;
  return true;
}

std::vector<Vec2> line_targets(const Vec2& a, const Vec2& b, int m) {
  std::vector<Vec2> out(m);
  if (m == 1) {
    out[0] = {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
    return out;
  }
  for (int k = 0; k < m; ++k) {
    const double t = static_cast<double>(k) / (m - 1);
    out[k] = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  }
  return out;
}

double line_reward(const EnvState& s, const TaskConfig& tc) {
  if (s.landmarks.size() != 2) throw std::invalid_argument("line: needs exactly two landmarks");
  const auto targets = line_targets(s.landmarks[0], s.landmarks[1],
                                    static_cast<int>(s.pos.size()));
  return -matched_mean_clipped(s.pos, targets, tc.distance_clip);
}

bool line_success(const EnvState& s, const TaskConfig& tc) {
  const auto targets = line_targets(s.landmarks[0], s.landmarks[1],
                                    static_cast<int>(s.pos.size()));
  return every_target_covered(s.pos, targets, tc.cover_threshold);
}

double task_reward(const EnvState& s, const TaskConfig& tc) {
  switch (tc.kind) {
    case TaskKind::Coverage: return coverage_reward(s, tc);
    case TaskKind::Formation: return formation_reward(s, tc);
    case TaskKind::Line: return line_reward(s, tc);
  }
  throw std::logic_error("unknown task kind");
}

bool task_success(const EnvState& s, const TaskConfig& tc) {
  switch (tc.kind) {
    case TaskKind::Coverage: return coverage_success(s, tc);
    case TaskKind::Formation: return formation_success(s, tc);
    case TaskKind::Line: return line_success(s, tc);
  }
  throw std::logic_error("unknown task kind");
}

double avg_min_distance(const EnvState& s) {
  double sum = 0.0;
  for (const auto& lm : s.landmarks) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : s.pos) best = std::min(best, dist(p, lm));
    sum += best;
  }
  return sum / static_cast<double>(s.landmarks.size());
}

}  // namespace swarm
