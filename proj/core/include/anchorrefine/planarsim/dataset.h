#ifndef ANCHORREFINE_PLANARSIM_DATASET_H_
#define ANCHORREFINE_PLANARSIM_DATASET_H_

// Demonstration datasets: expert episodes sliced into (context, action
// chunk) samples.
//
// File format, one JSON object per line:
//   line 1 (header): {"format_version", "H", "D_arm", "context_dim",
//                     "num_tasks", "normalization": {...}, "config_hash",
//                     "n_episodes", "task": {...}}
//   lines 2..: {"seed", "task_id", "observations", "actions", "outcome",
//               "gripper_switch_steps"}
// Actions are [dx, dy, dtheta, grip] with the arm part normalized.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anchorrefine/core/action.h"
#include "anchorrefine/planarsim/planarsim.h"

namespace anchorrefine::planarsim {

inline constexpr int kDatasetFormatVersion = 1;

// Column-per-sample training matrices.
struct SampleSet {
  int horizon = 0;
  int arm_width = kArmWidth;
  Eigen::MatrixXd contexts;     // context_dim x N
  Eigen::MatrixXd arm_targets;  // (H * D_arm) x N, step-major per column
  Eigen::MatrixXi grip_labels;  // H x N
  std::vector<int> episode_index;  // source episode per sample
  std::vector<int> step_index;     // source step per sample

  int size() const { return static_cast<int>(contexts.cols()); }
  int context_dim() const { return static_cast<int>(contexts.rows()); }

  core::ActionChunk Chunk(int sample) const;
  core::ArmChunk Arm(int sample) const;
  // Subset in the given order.
  SampleSet Select(const std::vector<int>& samples) const;
};

struct Dataset {
  int horizon = 8;
  TaskSpec task;
  uint64_t config_hash = 0;
  std::vector<Episode> episodes;  // sorted by seed
  SampleSet samples;
};

struct GenerateOptions {
  int n_episodes = 200;
  uint64_t seed = 0;
  double jitter_std = 0.0;
  int horizon = 8;
};

// Rolls the expert on seeds seed, seed + 1, ... keeping only successful
// episodes until n_episodes are collected. Throws ConfigError when the
// expert succeeds on fewer than half of 4 * n_episodes attempts.
Dataset GenerateDataset(const TaskSpec& task, const GenerateOptions& options);

// Slices every step t of every episode into (context_t, actions t..t+H-1),
// padding past the end with the final action.
SampleSet BuildSamples(const std::vector<Episode>& episodes,
                       const TaskSpec& task, int horizon);

std::string SerializeDataset(const Dataset& dataset);
void WriteDataset(const std::string& path, const Dataset& dataset);
Dataset ParseDataset(const std::string& text);
Dataset ReadDataset(const std::string& path);

}  // namespace anchorrefine::planarsim

#endif  // ANCHORREFINE_PLANARSIM_DATASET_H_
