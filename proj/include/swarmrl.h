/* swarmrl C API: train, evaluate, transfer and render decentralized swarm
 * policies. All functions return srl_status; srl_last_error() carries the
 * detail message of the most recent failure on the calling thread. Handles
 * are opaque and must be released with their destroy function. */

#ifndef SWARMRL_H
#define SWARMRL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SRL_API __declspec(dllexport)
#else
#define SRL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct srl_config srl_config;

typedef enum srl_status {
  SRL_OK = 0,
  SRL_ERR_INVALID_ARGUMENT = 1,
  SRL_ERR_IO = 2,
  SRL_ERR_PARSE = 3,
  SRL_ERR_CHECKPOINT = 4,
  SRL_ERR_NUMERIC = 5,
  SRL_ERR_LIFECYCLE = 6,
  SRL_ERR_INTERNAL = 7
} srl_status;

SRL_API const char* srl_version(void);
SRL_API const char* srl_status_name(srl_status status);

/* Message for the last failure on this thread; empty string if none. */
SRL_API const char* srl_last_error(void);

/* ---- configuration ------------------------------------------------- */

/* Defaults for a task: "coverage", "formation" or "line". */
SRL_API srl_status srl_config_create(const char* task, srl_config** out);

/* Parses a config file (line-oriented `key = value` under [section]
 * headers; see the project README for the grammar and key list). */
SRL_API srl_status srl_config_load(const char* path, srl_config** out);

/* Key paths are "section.key", e.g. srl_config_set(c, "ppo.lr", "1e-4"). */
SRL_API srl_status srl_config_set(srl_config* cfg, const char* key, const char* value);
SRL_API srl_status srl_config_get(const srl_config* cfg, const char* key, char* buf, size_t cap);

SRL_API void srl_config_destroy(srl_config* cfg);

/* ---- runs ---------------------------------------------------------- */

typedef struct srl_run_options {
  uint64_t seed;     /* used when has_seed != 0, else the config's seed */
  int has_seed;
  int threads;       /* <= 1: single-threaded */
  int deterministic; /* forces single-threaded execution */
} srl_run_options;

typedef struct srl_eval_summary {
  double success_rate;      /* percent */
  double mean_steps;        /* failures count the full horizon */
  double avg_min_distance;  /* coverage only; -1 otherwise */
  double mean_final_reward; /* team reward at the final step */
  int episodes;
} srl_eval_summary;

/* Trains per config into out_dir (metrics.csv + checkpoints). */
SRL_API srl_status srl_train(const srl_config* cfg, const char* out_dir,
                             const srl_run_options* opts);

/* Staged training over curriculum.stages team sizes. */
SRL_API srl_status srl_curriculum(const srl_config* cfg, const char* out_dir,
                                  const srl_run_options* opts);

/* Evaluates a checkpoint. agents_override <= 0 keeps the trained team
 * size. trajectory_csv may be NULL (no export). */
SRL_API srl_status srl_eval(const char* checkpoint_path, int episodes, int greedy,
                            int agents_override, const char* trajectory_csv,
                            const srl_run_options* opts, srl_eval_summary* out);

typedef struct srl_zeroshot_row {
  int delta;
  int agents;
  int skipped; /* team size < 1 */
  srl_eval_summary eval;
} srl_zeroshot_row;

/* Evaluates a checkpoint at team sizes M+delta without fine-tuning.
 * table_csv may be NULL. rows/cap/n_rows may be NULL to skip the copy. */
SRL_API srl_status srl_zeroshot(const char* checkpoint_path, int delta_min, int delta_max,
                                int episodes, const char* table_csv,
                                const srl_run_options* opts, srl_zeroshot_row* rows, int cap,
                                int* n_rows);

/* Renders one SVG per episode from a trajectory export. */
SRL_API srl_status srl_render(const char* trajectory_csv, const char* out_dir,
                              int* episodes_rendered);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SWARMRL_H */
