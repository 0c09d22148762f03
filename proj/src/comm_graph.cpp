#include "swarm/comm_graph.hpp"

#include <stdexcept>

namespace swarm {

AdjacencyMask build_adjacency(const std::vector<Vec2>& positions, CommMode mode, double radius) {
  const int m = static_cast<int>(positions.size());
  if (mode == CommMode::Unrestricted) return AdjacencyMask(m, true);
  if (radius <= 0) throw std::invalid_argument("build_adjacency: restricted mode needs radius > 0");
  AdjacencyMask mask(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (dist(positions[i], positions[j]) <= radius) mask.set(i, j, true);
  return mask;
}

DropoutSchedule::DropoutSchedule(double drop_fraction, int resample_period, Rng rng)
    : p_(drop_fraction), period_(resample_period), rng_(rng) {
  if (p_ < 0 || p_ >= 1) throw std::invalid_argument("dropout: fraction must be in [0,1)");
  if (period_ < 1) throw std::invalid_argument("dropout: resample period must be >= 1");
}

AdjacencyMask DropoutSchedule::apply(const AdjacencyMask& mask, int step) {
  if (step % period_ == 0) {
    dropped_.clear();
    auto edges = mask.edges();
    const int k = static_cast<int>(p_ * static_cast<double>(edges.size()));
    // partial Fisher-Yates: first k entries become the sample
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng_.below(edges.size() - i));
      std::swap(edges[i], edges[j]);
      dropped_.push_back(edges[i]);
    }
  }
  AdjacencyMask out = mask;
  for (const auto& [i, j] : dropped_)
    if (i < out.size() && j < out.size()) out.set(i, j, false);
  return out;
}

std::vector<int> connected_components(const AdjacencyMask& mask) {
  const int m = mask.size();
  std::vector<int> parent(m);
  for (int i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (mask.at(i, j)) parent[find(i)] = find(j);
  std::vector<int> comp(m, -1);
  int next = 0;
  for (int i = 0; i < m; ++i) {
    const int root = find(i);
    if (comp[root] == -1) comp[root] = next++;
    comp[i] = comp[root];
  }
  return comp;
}

}  // namespace swarm
