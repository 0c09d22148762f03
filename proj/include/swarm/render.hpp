#pragma once

#include <string>

#include "swarm/metrics.hpp"

namespace swarm {

// Renders one SVG per episode into out_dir (episode_###.svg): the arena
// square, landmarks as gray circles, agents as blue circles at their final
// positions with fading polyline trails. Returns the number of files
// written.
int render_trajectory(const std::string& trajectory_path, const std::string& out_dir);

std::string render_episode_svg(const TrajectoryEpisode& ep, double arena_half_width);

}  // namespace swarm
