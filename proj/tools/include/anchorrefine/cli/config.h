#ifndef ANCHORREFINE_CLI_CONFIG_H_
#define ANCHORREFINE_CLI_CONFIG_H_

// Run configuration: flat "key = value" text with [section] headers.
//
//   [task]   grasp_radius goal_radius max_step_len max_turn max_steps
//            obj_spawn goal_spawn task_id num_tasks
//   [data]   seed n_episodes jitter_std
//   [train]  seed horizon latent_dim hidden_widths activation epsilon
//            lambda_grip phase1_steps phase2_steps batch_size
//            learning_rate variant joint_detach
//   [eval]   eval_seeds execute_k profile_window smoothing_window
//   [run]    output_dir dataset_path emit_svg
//
// Outside any section, keys may be written fully qualified ("train.seed = 1"),
// which is the form of config.resolved.
//
// '#' and ';' start comments. Unknown sections or keys are rejected. The
// hash covers every key outside [run], formatted canonically.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "anchorrefine/pipeline/pipeline.h"
#include "anchorrefine/planarsim/planarsim.h"

namespace anchorrefine::cli {

struct RunConfig {
  planarsim::TaskSpec task;
  uint64_t data_seed = 0;
  int n_episodes = 200;
  double jitter_std = 0.15;
  pipeline::TrainConfig train;
  int eval_seeds = 200;
  int execute_k = 0;
  int profile_window = 10;
  int smoothing_window = 100;
  std::string output_dir;  // empty: $ANCHORREFINE_OUTPUT_ROOT or "runs"
  std::string dataset_path;  // empty: <output_dir>/dataset.jsonl
  bool emit_svg = false;

  // Throws ConfigError. Also derives train.context_dim from the task.
  void Validate();
};

// Sets "section.key" from its text form; throws ConfigError.
void SetKey(RunConfig& config, const std::string& key,
            const std::string& value);

// Applies the file text on top of `config`; throws ConfigError with the
// offending line number.
void ApplyConfigText(const std::string& text, RunConfig& config);
RunConfig LoadConfigFile(const std::string& path);

// Every key in canonical (sorted) order with its canonical value text.
std::vector<std::pair<std::string, std::string>> CanonicalEntries(
    const RunConfig& config);
// The hashed subset as "key=value\n" lines.
std::string CanonicalText(const RunConfig& config);
uint64_t ConfigHash(const RunConfig& config);

inline constexpr const char* kOutputRootEnv = "ANCHORREFINE_OUTPUT_ROOT";
std::string ResolveOutputDir(const RunConfig& config);

}  // namespace anchorrefine::cli

#endif  // ANCHORREFINE_CLI_CONFIG_H_
