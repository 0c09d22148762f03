#include "swarm/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace swarm {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

const char* MetricsWriter::header() {
  return "iteration,wall_time_s,agents,mean_episode_reward,success_rate,mean_episode_length,"
         "avg_min_distance,loss,policy_loss,value_loss,entropy,clip_fraction";
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("metrics: cannot open '" + path + "' for writing");
  out_ << header() << "\n";
  out_.flush();
}

void MetricsWriter::write(const MetricsRow& r) {
  out_ << r.iteration << ',' << num(r.wall_time_s) << ',' << r.agents << ','
       << num(r.mean_episode_reward) << ',' << num(r.success_rate) << ','
       << num(r.mean_episode_length) << ',' << num(r.avg_min_distance) << ',' << num(r.loss)
       << ',' << num(r.policy_loss) << ',' << num(r.value_loss) << ',' << num(r.entropy) << ','
       << num(r.clip_fraction) << "\n";
  out_.flush();
}

TrajectoryWriter::TrajectoryWriter(const std::string& path, double arena_half_width)
    : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("trajectory: cannot open '" + path + "' for writing");
  out_ << "# arena_half_width = " << num(arena_half_width) << "\n";
  out_ << "episode,step,agent,px,py,vx,vy,action,reward\n";
}

void TrajectoryWriter::begin_episode(int episode, const std::vector<Vec2>& landmarks) {
  for (size_t l = 0; l < landmarks.size(); ++l)
    out_ << episode << ",-1," << l << ',' << num(landmarks[l].x) << ',' << num(landmarks[l].y)
         << ",0,0,0,0\n";
}

void TrajectoryWriter::step_row(int episode, int step, int agent, const Vec2& pos,
                                const Vec2& vel, int action, double reward) {
  out_ << episode << ',' << step << ',' << agent << ',' << num(pos.x) << ',' << num(pos.y) << ','
       << num(vel.x) << ',' << num(vel.y) << ',' << action << ',' << num(reward) << "\n";
}

TrajectoryFile read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trajectory: cannot open '" + path + "'");
  TrajectoryFile tf;
  std::map<int, TrajectoryEpisode> episodes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (line.find("arena_half_width") != std::string::npos && eq != std::string::npos)
        tf.arena_half_width = std::stod(line.substr(eq + 1));
      continue;
    }
    if (line.rfind("episode,", 0) == 0) continue;  // header
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9)
      throw std::runtime_error("trajectory: malformed row at line " + std::to_string(lineno));
    try {
      const int episode = std::stoi(fields[0]);
      const int step = std::stoi(fields[1]);
      const int agent = std::stoi(fields[2]);
      auto& ep = episodes[episode];
      ep.episode = episode;
      if (step == -1) {
        if (static_cast<int>(ep.landmarks.size()) <= agent) ep.landmarks.resize(agent + 1);
        ep.landmarks[agent] = {std::stod(fields[3]), std::stod(fields[4])};
      } else {
        if (static_cast<int>(ep.agents.size()) <= agent) ep.agents.resize(agent + 1);
        ep.agents[agent].push_back({step, std::stod(fields[3]), std::stod(fields[4]),
                                    std::stod(fields[5]), std::stod(fields[6]),
                                    std::stoi(fields[7]), std::stod(fields[8])});
      }
    } catch (const std::exception&) {
      throw std::runtime_error("trajectory: malformed row at line " + std::to_string(lineno));
    }
  }
  for (auto& [id, ep] : episodes) {
    for (auto& pts : ep.agents)
      std::sort(pts.begin(), pts.end(),
                [](const TrajectoryPoint& a, const TrajectoryPoint& b) { return a.step < b.step; });
    tf.episodes.push_back(std::move(ep));
  }
  return tf;
}

}  // namespace swarm
