#include "swarm/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace swarm {

namespace {

constexpr double kView = 640.0;
constexpr double kMargin = 24.0;

struct Mapper {
  double half_width;
  double scale;
  // arena corners map to viewport corners (y flipped: svg y grows downward)
  double x(double wx) const { return kMargin + (wx + half_width) * scale; }
  double y(double wy) const { return kMargin + (half_width - wy) * scale; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_episode_svg(const TrajectoryEpisode& ep, double arena_half_width) {
  double hw = arena_half_width;
  if (hw <= 0) {
    // fall back to data extents
    hw = 1.0;
    for (const auto& lm : ep.landmarks) hw = std::max({hw, std::abs(lm.x), std::abs(lm.y)});
    for (const auto& pts : ep.agents)
      for (const auto& p : pts) hw = std::max({hw, std::abs(p.px), std::abs(p.py)});
  }
  Mapper m{hw, (kView - 2 * kMargin) / (2 * hw)};
  const double side = kView;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
      << "\" viewBox=\"0 0 " << side << " " << side << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << side << "\" height=\"" << side
      << "\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << side - 2 * kMargin
      << "\" height=\"" << side - 2 * kMargin
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1.5\"/>\n";

  for (const auto& lm : ep.landmarks)
    svg << "<circle cx=\"" << fmt(m.x(lm.x)) << "\" cy=\"" << fmt(m.y(lm.y)) << "\" r=\""
        << fmt(0.1 * m.scale) << "\" fill=\"#9e9e9e\"/>\n";

  for (const auto& pts : ep.agents) {
    if (pts.empty()) continue;
    const size_t n = pts.size();
    for (size_t i = 0; i + 1 < n; ++i) {
      const double opacity = 0.15 + 0.75 * (static_cast<double>(i + 1) / n);
      svg << "<line x1=\"" << fmt(m.x(pts[i].px)) << "\" y1=\"" << fmt(m.y(pts[i].py))
          << "\" x2=\"" << fmt(m.x(pts[i + 1].px)) << "\" y2=\"" << fmt(m.y(pts[i + 1].py))
          << "\" stroke=\"#1e6fd9\" stroke-width=\"1.2\" stroke-opacity=\"" << fmt(opacity)
          << "\"/>\n";
    }
    svg << "<circle cx=\"" << fmt(m.x(pts.back().px)) << "\" cy=\"" << fmt(m.y(pts.back().py))
        << "\" r=\"" << fmt(0.05 * m.scale) << "\" fill=\"#1e6fd9\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

int render_trajectory(const std::string& trajectory_path, const std::string& out_dir) {
  const TrajectoryFile tf = read_trajectory(trajectory_path);
  std::filesystem::create_directories(out_dir);
  int written = 0;
  for (const auto& ep : tf.episodes) {
    char name[64];
    std::snprintf(name, sizeof(name), "episode_%03d.svg", ep.episode);
    std::ofstream out(std::filesystem::path(out_dir) / name);
    if (!out) throw std::runtime_error("render: cannot write into '" + out_dir + "'");
    out << render_episode_svg(ep, tf.arena_half_width);
    ++written;
  }
  // an empty trajectory still yields one arena-only svg for inspection
  if (tf.episodes.empty()) {
    TrajectoryEpisode empty;
    std::ofstream out(std::filesystem::path(out_dir) / "episode_000.svg");
    out << render_episode_svg(empty, tf.arena_half_width);
    written = 1;
  }
  return written;
}

}  // namespace swarm
