#include "swarmrl.h"

#include <cstring>
#include <string>

#include "swarm/config.hpp"
#include "swarm/render.hpp"
#include "swarm/trainer.hpp"

struct srl_config {
  swarm::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

srl_status fail(srl_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Maps C++ exceptions onto status codes by message origin.
srl_status classify(const std::exception& e) {
  const std::string msg = e.what();
  auto has = [&](const char* s) { return msg.find(s) != std::string::npos; };
  if (has("checkpoint:")) return SRL_ERR_CHECKPOINT;
  if (has("cannot open") || has("write failed") || has("cannot write") ||
      has("filesystem")) return SRL_ERR_IO;
  if (has("config") || has("unknown")) return SRL_ERR_PARSE;
  if (has("non-finite") || has("nan")) return SRL_ERR_NUMERIC;
  if (has("finished episode")) return SRL_ERR_LIFECYCLE;
  return SRL_ERR_INVALID_ARGUMENT;
}

template <class F>
srl_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const std::exception& e) {
    return fail(classify(e), e.what());
  } catch (...) {
    return fail(SRL_ERR_INTERNAL, "unknown error");
  }
}

swarm::RunConfig with_options(const swarm::RunConfig& base, const srl_run_options* opts) {
  swarm::RunConfig cfg = base;
  if (opts && opts->has_seed) cfg.seed = opts->seed;
  return cfg;
}

int thread_count(const srl_run_options* opts) {
  if (!opts) return 1;
  if (opts->deterministic) return 1;
  return opts->threads > 1 ? opts->threads : 1;
}

srl_eval_summary to_c(const swarm::EvalSummary& s) {
  srl_eval_summary out;
  out.success_rate = s.success_rate;
  out.mean_steps = s.mean_steps;
  out.avg_min_distance = s.avg_min_distance;
  out.mean_final_reward = s.mean_final_reward;
  out.episodes = s.episodes;
  return out;
}

}  // namespace

extern "C" {

const char* srl_version(void) { return "1.0.0"; }

const char* srl_status_name(srl_status status) {
  switch (status) {
    case SRL_OK: return "ok";
    case SRL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SRL_ERR_IO: return "io error";
    case SRL_ERR_PARSE: return "parse error";
    case SRL_ERR_CHECKPOINT: return "checkpoint error";
    case SRL_ERR_NUMERIC: return "numeric error";
    case SRL_ERR_LIFECYCLE: return "lifecycle error";
    case SRL_ERR_INTERNAL: return "internal error";
  }
  return "?";
}

const char* srl_last_error(void) { return g_last_error.c_str(); }

srl_status srl_config_create(const char* task, srl_config** out) {
  return guarded([&]() -> srl_status {
    if (!task || !out) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    auto cfg = std::make_unique<srl_config>();
    cfg->cfg = swarm::RunConfig::defaults_for(swarm::task_from_name(task));
    *out = cfg.release();
    return SRL_OK;
  });
}

srl_status srl_config_load(const char* path, srl_config** out) {
  return guarded([&]() -> srl_status {
    if (!path || !out) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    auto cfg = std::make_unique<srl_config>();
    cfg->cfg = swarm::RunConfig::parse_file(path);
    *out = cfg.release();
    return SRL_OK;
  });
}

srl_status srl_config_set(srl_config* cfg, const char* key, const char* value) {
  return guarded([&]() -> srl_status {
    if (!cfg || !key || !value) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    cfg->cfg.set(key, value);
    return SRL_OK;
  });
}

srl_status srl_config_get(const srl_config* cfg, const char* key, char* buf, size_t cap) {
  return guarded([&]() -> srl_status {
    if (!cfg || !key || !buf || cap == 0) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    const std::string v = cfg->cfg.get(key);
    if (v.size() + 1 > cap) return fail(SRL_ERR_INVALID_ARGUMENT, "buffer too small");
    std::memcpy(buf, v.c_str(), v.size() + 1);
    return SRL_OK;
  });
}

void srl_config_destroy(srl_config* cfg) { delete cfg; }

srl_status srl_train(const srl_config* cfg, const char* out_dir, const srl_run_options* opts) {
  return guarded([&]() -> srl_status {
    if (!cfg || !out_dir) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    swarm::Trainer trainer(with_options(cfg->cfg, opts), out_dir, thread_count(opts));
    trainer.train();
    return SRL_OK;
  });
}

srl_status srl_curriculum(const srl_config* cfg, const char* out_dir,
                          const srl_run_options* opts) {
  return guarded([&]() -> srl_status {
    if (!cfg || !out_dir) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    swarm::Trainer trainer(with_options(cfg->cfg, opts), out_dir, thread_count(opts));
    trainer.curriculum();
    return SRL_OK;
  });
}

srl_status srl_eval(const char* checkpoint_path, int episodes, int greedy, int agents_override,
                    const char* trajectory_csv, const srl_run_options* opts,
                    srl_eval_summary* out) {
  return guarded([&]() -> srl_status {
    if (!checkpoint_path || !out) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    if (episodes < 1) return fail(SRL_ERR_INVALID_ARGUMENT, "episodes must be >= 1");
    std::optional<uint64_t> seed;
    if (opts && opts->has_seed) seed = opts->seed;
    const auto summary =
        swarm::eval_checkpoint(checkpoint_path, episodes, greedy != 0, agents_override,
                               trajectory_csv ? trajectory_csv : "", seed);
    *out = to_c(summary);
    return SRL_OK;
  });
}

srl_status srl_zeroshot(const char* checkpoint_path, int delta_min, int delta_max, int episodes,
                        const char* table_csv, const srl_run_options* opts,
                        srl_zeroshot_row* rows, int cap, int* n_rows) {
  return guarded([&]() -> srl_status {
    if (!checkpoint_path) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    if (episodes < 1) return fail(SRL_ERR_INVALID_ARGUMENT, "episodes must be >= 1");
    std::optional<uint64_t> seed;
    if (opts && opts->has_seed) seed = opts->seed;
    const auto table = swarm::zeroshot(checkpoint_path, delta_min, delta_max, episodes,
                                       table_csv ? table_csv : "", seed);
    if (n_rows) *n_rows = static_cast<int>(table.size());
    if (rows) {
      if (cap < static_cast<int>(table.size()))
        return fail(SRL_ERR_INVALID_ARGUMENT, "row buffer too small");
      for (size_t i = 0; i < table.size(); ++i) {
        rows[i].delta = table[i].delta;
        rows[i].agents = table[i].agents;
        rows[i].skipped = table[i].skipped ? 1 : 0;
        rows[i].eval = to_c(table[i].eval);
      }
    }
    return SRL_OK;
  });
}

srl_status srl_render(const char* trajectory_csv, const char* out_dir, int* episodes_rendered) {
  return guarded([&]() -> srl_status {
    if (!trajectory_csv || !out_dir) return fail(SRL_ERR_INVALID_ARGUMENT, "null argument");
    const int n = swarm::render_trajectory(trajectory_csv, out_dir);
    if (episodes_rendered) *episodes_rendered = n;
    return SRL_OK;
  });
}

}  // extern "C"
