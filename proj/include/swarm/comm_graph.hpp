#pragma once

#include <utility>
#include <vector>

#include "swarm/env.hpp"
#include "swarm/mask.hpp"
#include "swarm/rng.hpp"

namespace swarm {

enum class CommMode { Unrestricted, Restricted };

// Unrestricted: fully connected. Restricted: agents within radius (boundary
// inclusive) are connected; self-edges always.
AdjacencyMask build_adjacency(const std::vector<Vec2>& positions, CommMode mode,
                              double radius = 0.0);

// Training-time communication dropout. A fraction p of the currently
// connected undirected off-diagonal edges is removed; the dropped set is
// resampled whenever step is a multiple of resample_period and held constant
// in between. Self-edges are never dropped.
class DropoutSchedule {
 public:
  DropoutSchedule() = default;
  DropoutSchedule(double drop_fraction, int resample_period, Rng rng);

  AdjacencyMask apply(const AdjacencyMask& mask, int step);

  const std::vector<std::pair<int, int>>& dropped() const { return dropped_; }
  double drop_fraction() const { return p_; }
  int resample_period() const { return period_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

 private:
  double p_ = 0.5;
  int period_ = 10;
  Rng rng_;
  std::vector<std::pair<int, int>> dropped_;
};

// Component id per agent, numbered in first-seen order.
std::vector<int> connected_components(const AdjacencyMask& mask);

}  // namespace swarm
