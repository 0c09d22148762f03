#include "swarm/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swarm {

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::Coverage: return "coverage";
    case TaskKind::Formation: return "formation";
    case TaskKind::Line: return "line";
  }
  return "?";
}

TaskKind task_from_name(const std::string& s) {
  if (s == "coverage") return TaskKind::Coverage;
  if (s == "formation") return TaskKind::Formation;
  if (s == "line") return TaskKind::Line;
  throw std::invalid_argument("unknown task '" + s + "' (coverage|formation|line)");
}

CommVariant variant_from_name(const std::string& s) {
  if (s == "mha") return CommVariant::MHA;
  if (s == "exp") return CommVariant::ExpKernel;
  if (s == "uniform") return CommVariant::Uniform;
  throw std::invalid_argument("unknown comm variant '" + s + "' (mha|exp|uniform)");
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected boolean, got '" + v + "'");
}

double parse_double(const std::string& v) {
  size_t pos = 0;
  double d = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("expected number, got '" + v + "'");
  return d;
}

int parse_int(const std::string& v) {
  size_t pos = 0;
  long d = std::stol(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("expected integer, got '" + v + "'");
  return static_cast<int>(d);
}

uint64_t parse_u64(const std::string& v) {
  size_t pos = 0;
  unsigned long long d = std::stoull(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("expected integer, got '" + v + "'");
  return d;
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(item));
  }
  if (out.empty()) throw std::invalid_argument("expected comma-separated integers, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

RunConfig RunConfig::defaults_for(TaskKind kind) {
  RunConfig cfg;
  cfg.set("run.task", task_name(kind));
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "run.task") {
    task = task_from_name(v);
    // task-dependent defaults; later keys may still override these
    if (task == TaskKind::Coverage) {
      arena_half_width = 2.0;
      comm_radius = 2.0;
    } else {
      arena_half_width = 1.0;
      comm_radius = 1.0;
    }
  } else if (key == "run.agents") {
    agents = parse_int(v);
  } else if (key == "run.comm") {
    if (v == "unrestricted")
      comm = CommMode::Unrestricted;
    else if (v == "restricted")
      comm = CommMode::Restricted;
    else
      throw std::invalid_argument("unknown comm mode '" + v + "' (unrestricted|restricted)");
  } else if (key == "run.comm_radius") {
    comm_radius = parse_double(v);
  } else if (key == "run.variant") {
    variant = variant_from_name(v);
  } else if (key == "run.dropout") {
    dropout = parse_bool(v);
  } else if (key == "run.dropout_p") {
    dropout_p = parse_double(v);
  } else if (key == "run.dropout_period") {
    dropout_period = parse_int(v);
  } else if (key == "run.dropout_in_eval") {
    dropout_in_eval = parse_bool(v);
  } else if (key == "run.seed") {
    seed = parse_u64(v);
  } else if (key == "policy.hidden") {
    hidden = parse_int(v);
  } else if (key == "policy.hops") {
    hops = parse_int(v);
  } else if (key == "policy.heads") {
    heads = parse_int(v);
  } else if (key == "policy.tied_hops") {
    tied_hops = parse_bool(v);
  } else if (key == "env.arena_half_width") {
    arena_half_width = parse_double(v);
  } else if (key == "env.accel_scale") {
    accel_scale = parse_double(v);
  } else if (key == "env.dt") {
    dt = parse_double(v);
  } else if (key == "env.damping") {
    damping = parse_double(v);
  } else if (key == "env.horizon") {
    horizon = parse_int(v);
  } else if (key == "task.cover_threshold") {
    task_cfg.cover_threshold = parse_double(v);
  } else if (key == "task.formation_radius") {
    task_cfg.formation_radius = parse_double(v);
  } else if (key == "task.radial_tolerance") {
    task_cfg.radial_tolerance = parse_double(v);
  } else if (key == "task.angular_tolerance") {
    task_cfg.angular_tolerance = parse_double(v);
  } else if (key == "task.distance_clip") {
    task_cfg.distance_clip = parse_double(v);
  } else if (key == "ppo.gamma") {
    ppo.gamma = parse_double(v);
  } else if (key == "ppo.lambda") {
    ppo.lambda = parse_double(v);
  } else if (key == "ppo.clip_eps") {
    ppo.clip_eps = parse_double(v);
  } else if (key == "ppo.value_coef") {
    ppo.value_coef = parse_double(v);
  } else if (key == "ppo.entropy_coef") {
    ppo.entropy_coef = parse_double(v);
  } else if (key == "ppo.epochs") {
    ppo.epochs = parse_int(v);
  } else if (key == "ppo.lr") {
    ppo.lr = parse_double(v);
  } else if (key == "ppo.n_envs") {
    ppo.n_envs = parse_int(v);
  } else if (key == "ppo.rollout_len") {
    ppo.rollout_len = parse_int(v);
  } else if (key == "ppo.minibatches") {
    ppo.minibatches = parse_int(v);
  } else if (key == "ppo.grad_clip") {
    ppo.grad_clip = parse_double(v);
  } else if (key == "ppo.advantage_norm") {
    ppo.advantage_norm = parse_bool(v);
  } else if (key == "train.max_updates") {
    max_updates = parse_int(v);
  } else if (key == "train.eval_every") {
    eval_every = parse_int(v);
  } else if (key == "train.eval_episodes") {
    eval_episodes = parse_int(v);
  } else if (key == "train.success_threshold") {
    success_threshold = parse_double(v);
  } else if (key == "curriculum.stages") {
    stages = parse_int_list(v);
  } else if (key == "curriculum.stage_budget") {
    stage_budget = parse_int(v);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string RunConfig::get(const std::string& key) const {
  if (key == "run.task") return task_name(task);
  if (key == "run.agents") return std::to_string(agents);
  if (key == "run.comm") return comm == CommMode::Unrestricted ? "unrestricted" : "restricted";
  if (key == "run.comm_radius") return fmt(comm_radius);
  if (key == "run.variant") return variant_name(variant);
  if (key == "run.dropout") return dropout ? "true" : "false";
  if (key == "run.dropout_p") return fmt(dropout_p);
  if (key == "run.dropout_period") return std::to_string(dropout_period);
  if (key == "run.dropout_in_eval") return dropout_in_eval ? "true" : "false";
  if (key == "run.seed") return std::to_string(seed);
  if (key == "policy.hidden") return std::to_string(hidden);
  if (key == "policy.hops") return std::to_string(hops);
  if (key == "policy.heads") return std::to_string(heads);
  if (key == "policy.tied_hops") return tied_hops ? "true" : "false";
  if (key == "env.arena_half_width") return fmt(arena_half_width);
  if (key == "env.accel_scale") return fmt(accel_scale);
  if (key == "env.dt") return fmt(dt);
  if (key == "env.damping") return fmt(damping);
  if (key == "env.horizon") return std::to_string(horizon);
  if (key == "task.cover_threshold") return fmt(task_cfg.cover_threshold);
  if (key == "task.formation_radius") return fmt(task_cfg.formation_radius);
  if (key == "task.radial_tolerance") return fmt(task_cfg.radial_tolerance);
  if (key == "task.angular_tolerance") return fmt(task_cfg.angular_tolerance);
  if (key == "task.distance_clip") return fmt(task_cfg.distance_clip);
  if (key == "ppo.gamma") return fmt(ppo.gamma);
  if (key == "ppo.lambda") return fmt(ppo.lambda);
  if (key == "ppo.clip_eps") return fmt(ppo.clip_eps);
  if (key == "ppo.value_coef") return fmt(ppo.value_coef);
  if (key == "ppo.entropy_coef") return fmt(ppo.entropy_coef);
  if (key == "ppo.epochs") return std::to_string(ppo.epochs);
  if (key == "ppo.lr") return fmt(ppo.lr);
  if (key == "ppo.n_envs") return std::to_string(ppo.n_envs);
  if (key == "ppo.rollout_len") return std::to_string(ppo.rollout_len);
  if (key == "ppo.minibatches") return std::to_string(ppo.minibatches);
  if (key == "ppo.grad_clip") return fmt(ppo.grad_clip);
  if (key == "ppo.advantage_norm") return ppo.advantage_norm ? "true" : "false";
  if (key == "train.max_updates") return std::to_string(max_updates);
  if (key == "train.eval_every") return std::to_string(eval_every);
  if (key == "train.eval_episodes") return std::to_string(eval_episodes);
  if (key == "train.success_threshold") return fmt(success_threshold);
  if (key == "curriculum.stages") {
    std::string out;
    for (size_t i = 0; i < stages.size(); ++i) out += (i ? "," : "") + std::to_string(stages[i]);
    return out;
  }
  if (key == "curriculum.stage_budget") return std::to_string(stage_budget);
  throw std::invalid_argument("unknown config key '" + key + "'");
}

RunConfig RunConfig::parse_text(const std::string& text) {
  // First pass finds run.task so its defaults apply before any override.
  std::vector<std::pair<std::string, std::string>> entries;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": key outside any section");
    entries.emplace_back(section + "." + key, value);
  }
  RunConfig cfg;
  for (const auto& [k, v] : entries)
    if (k == "run.task") cfg.set(k, v);
  for (const auto& [k, v] : entries)
    if (k != "run.task") cfg.set(k, v);
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

std::string RunConfig::to_text() const {
  static const char* keys[] = {
      "run.task", "run.agents", "run.comm", "run.comm_radius", "run.variant", "run.dropout",
      "run.dropout_p", "run.dropout_period", "run.dropout_in_eval", "run.seed",
      "policy.hidden", "policy.hops", "policy.heads", "policy.tied_hops",
      "env.arena_half_width", "env.accel_scale", "env.dt", "env.damping", "env.horizon",
      "task.cover_threshold", "task.formation_radius", "task.radial_tolerance",
      "task.angular_tolerance", "task.distance_clip",
      "ppo.gamma", "ppo.lambda", "ppo.clip_eps", "ppo.value_coef", "ppo.entropy_coef",
      "ppo.epochs", "ppo.lr", "ppo.n_envs", "ppo.rollout_len", "ppo.minibatches",
      "ppo.grad_clip", "ppo.advantage_norm",
      "train.max_updates", "train.eval_every", "train.eval_episodes", "train.success_threshold",
      "curriculum.stages", "curriculum.stage_budget"};
  std::string out;
  std::string section;
  for (const char* k : keys) {
    const std::string key(k);
    const std::string sec = key.substr(0, key.find('.'));
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(key.find('.') + 1) + " = " + get(key) + "\n";
  }
  return out;
}

void RunConfig::validate() const {
  if (agents < 1) throw std::invalid_argument("config: agents must be >= 1");
  if (eval_episodes < 1) throw std::invalid_argument("config: eval_episodes must be >= 1");
  if (eval_every < 1) throw std::invalid_argument("config: eval_every must be >= 1");
  if (max_updates < 0) throw std::invalid_argument("config: max_updates must be >= 0");
  if (success_threshold < 0 || success_threshold > 1)
    throw std::invalid_argument("config: success_threshold in [0,1]");
  for (size_t i = 1; i < stages.size(); ++i)
    if (stages[i] <= stages[i - 1])
      throw std::invalid_argument("config: curriculum stages must be strictly increasing");
  if (!stages.empty() && stages.front() < 1)
    throw std::invalid_argument("config: curriculum stages must be >= 1");
  world().validate();
  task_config().validate();
  ppo.validate();
  policy().validate();
}

WorldConfig RunConfig::world() const {
  WorldConfig wc;
  wc.arena_half_width = arena_half_width;
  wc.dt = dt;
  wc.damping = damping;
  wc.accel_scale = accel_scale;
  wc.horizon = horizon;
  wc.num_agents = agents;
  wc.num_landmarks = landmarks();
  return wc;
}

TaskConfig RunConfig::task_config() const {
  TaskConfig tc = task_cfg;
  tc.kind = task;
  return tc;
}

CommConfig RunConfig::comm_config() const {
  CommConfig cc;
  cc.mode = comm;
  cc.radius = comm_radius;
  cc.dropout = dropout;
  cc.dropout_p = dropout_p;
  cc.dropout_period = dropout_period;
  cc.dropout_in_eval = dropout_in_eval;
  return cc;
}

PolicyConfig RunConfig::policy() const {
  PolicyConfig pc;
  pc.hidden = hidden;
  pc.hops = hops;
  pc.heads = heads;
  pc.variant = variant;
  pc.tied_hops = tied_hops;
  return pc;
}

}  // namespace swarm
