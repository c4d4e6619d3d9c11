#ifndef ANCHORREFINE_PIPELINE_PIPELINE_H_
#define ANCHORREFINE_PIPELINE_PIPELINE_H_

// Two-phase anchor/refine training.
//
// Phase 1 trains the anchor network on the full arm chunk (MSE) plus
// per-step gripper BCE. Phase 2 freezes the anchor and trains two refine
// branches over the same context: an arm branch regressing the residual
// A_arm - anchor_arm, and a gripper branch regressing the margin-padded
// decision correction. The ablation variants are configuration switches on
// top of this.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "anchorrefine/core/action.h"
#include "anchorrefine/diffnet/approximator.h"
#include "anchorrefine/diffnet/param_store.h"
#include "anchorrefine/planarsim/dataset.h"

namespace anchorrefine::pipeline {

enum class Variant {
  kFull,
  kNoGripRefine,
  kNaiveGripMSE,
  kNoDetach,
  kExplicitConcat,
  kAnchorOnlyDeep,
  kDirectActionPhase2,
};

inline constexpr std::array<Variant, 7> kAllVariants = {
    Variant::kFull,           Variant::kNoGripRefine,
    Variant::kNaiveGripMSE,   Variant::kNoDetach,
    Variant::kExplicitConcat, Variant::kAnchorOnlyDeep,
    Variant::kDirectActionPhase2};

std::string_view VariantName(Variant v);
// Throws ConfigError for unknown names.
Variant ParseVariant(std::string_view name);

struct TrainConfig {
  int horizon = 8;
  int arm_width = 3;
  int context_dim = 11;
  int latent_dim = 16;
  std::vector<int> hidden_widths{128, 128};
  diffnet::Activation activation = diffnet::Activation::kTanh;
  double epsilon = core::kDefaultGripMargin;
  double lambda_grip = 0.01;
  int phase1_steps = 20000;
  int phase2_steps = 8000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  Variant variant = Variant::kFull;
  // NoDetach only: keep the anchor output constant in the residual target
  // while still training both branches jointly (the paired control).
  bool joint_detach = false;

  // Throws ConfigError.
  void Validate() const;
};

inline constexpr std::string_view kAnchorPrefix = "anchor.";
inline constexpr std::string_view kRefinePrefix = "refine.";

struct Architecture {
  Variant variant = Variant::kFull;
  int horizon = 8;
  int arm_width = 3;
  int context_dim = 11;
  double epsilon = core::kDefaultGripMargin;
  diffnet::ApproximatorSpec anchor;
  std::optional<diffnet::ApproximatorSpec> refine_arm;
  std::optional<diffnet::ApproximatorSpec> refine_grip;

  bool has_refine() const { return refine_arm.has_value(); }
  int arm_dim() const { return horizon * arm_width; }
};

// AnchorOnlyDeep widens the anchor's hidden layers by 1.5x and has no
// refine branches; ExplicitConcat widens the refine input by H*D + H.
Architecture MakeArchitecture(const TrainConfig& config);

void AddAnchorParams(const Architecture& arch, diffnet::ParamStore& params);
void AddRefineParams(const Architecture& arch, diffnet::ParamStore& params);
// Store with every tensor of the architecture (zero-valued).
diffnet::ParamStore MakeParamStore(const Architecture& arch);

// Throws ConfigError if the samples do not match the configuration.
void CheckSchema(const TrainConfig& config, const planarsim::SampleSet& data);

struct LossRecord {
  int phase = 1;
  int64_t step = 0;
  double arm_loss = 0.0;
  double grip_loss = 0.0;
  double total = 0.0;
};

inline constexpr std::string_view kGripLossColumn = "grip_loss";
inline constexpr std::string_view kNaiveGripLossColumn = "grip_naive_mse";

struct LossLog {
  std::vector<LossRecord> records;
  // Header of the gripper column; the naive ablation optimizes a different
  // quantity and says so.
  std::string grip_column = std::string(kGripLossColumn);
  std::vector<double> Totals() const;
};

// CSV with '#'-prefixed metadata lines, then
// "phase,step,arm_loss,<grip_column>,total".
std::string SerializeLossLog(const LossLog& log,
                             const std::vector<std::string>& metadata = {});
LossLog ParseLossLog(const std::string& text);
void WriteLossLog(const std::string& path, const LossLog& log,
                  const std::vector<std::string>& metadata = {});
LossLog ReadLossLog(const std::string& path);

// Invoked after every optimizer step (step is 1-based).
using StepCallback =
    std::function<void(int64_t step, const diffnet::ParamStore& params)>;

// Deterministic mini-batch order: consecutive slices of per-epoch seeded
// permutations.
class BatchSampler {
 public:
  BatchSampler(int dataset_size, int batch_size, uint64_t seed,
               uint64_t stream);
  std::vector<int> Next();

 private:
  void Reshuffle();

  int dataset_size_;
  int batch_size_;
  uint64_t seed_;
  uint64_t stream_;
  uint64_t epoch_ = 0;
  std::vector<int> order_;
  size_t cursor_ = 0;
};

// Creates and initializes the anchor tensors in `params`, then trains them.
LossLog TrainPhase1(const TrainConfig& config, const Architecture& arch,
                    const planarsim::SampleSet& data,
                    diffnet::ParamStore& params,
                    const StepCallback& on_step = {});

// Requires trained anchor tensors in `params`. Creates the refine tensors
// (fresh init, latents cloned from the anchor latent), freezes the anchor
// (except under NoDetach), and trains. Throws NumericalError if a frozen
// anchor ever changes or a loss goes non-finite.
LossLog TrainPhase2(const TrainConfig& config, const Architecture& arch,
                    const planarsim::SampleSet& data,
                    diffnet::ParamStore& params,
                    const StepCallback& on_step = {});

struct AnchorOutputs {
  Eigen::MatrixXd arm;     // (H * D) x B
  Eigen::MatrixXd logits;  // H x B
  Eigen::MatrixXd probs;   // H x B, clamped sigmoid
};
AnchorOutputs RunAnchor(const Architecture& arch,
                        const diffnet::ParamStore& params,
                        const Eigen::MatrixXd& contexts);

// Phase-2 supervision for a batch, computed from the frozen anchor. Refine
// inputs are the contexts themselves except under ExplicitConcat.
struct ResidualBatch {
  Eigen::MatrixXd refine_inputs;
  Eigen::MatrixXd arm_target;   // (H * D) x B
  Eigen::MatrixXd grip_target;  // H x B; empty without a gripper branch
  AnchorOutputs anchor;
};
ResidualBatch MakeResidualBatch(const TrainConfig& config,
                                const Architecture& arch,
                                const diffnet::ParamStore& params,
                                const planarsim::SampleSet& batch);

// Refine input for contexts given the anchor outputs on them.
Eigen::MatrixXd RefineInputs(const Architecture& arch,
                             const Eigen::MatrixXd& contexts,
                             const AnchorOutputs& anchor);

enum class InferenceMode { kAnchorOnly, kFull };

struct ChunkBatch {
  Eigen::MatrixXd arm;   // (H * D) x B, clamped to [-1, 1]
  Eigen::MatrixXi grip;  // H x B
};

// Composes anchor and refine outputs according to the variant. kFull on an
// architecture without refine branches falls back to anchor-only.
ChunkBatch PredictBatch(const Architecture& arch,
                        const diffnet::ParamStore& params, InferenceMode mode,
                        const Eigen::MatrixXd& contexts);
core::ActionChunk Predict(const Architecture& arch,
                          const diffnet::ParamStore& params, InferenceMode mode,
                          std::span<const double> context);

// Checkpoint prefixes for each phase's output. Under NoDetach the refine
// checkpoint also carries the jointly trained anchor.
std::vector<std::string> AnchorCheckpointPrefixes();
std::vector<std::string> RefineCheckpointPrefixes(const Architecture& arch);

struct Model {
  Architecture arch;
  diffnet::ParamStore params;
  bool has_refine = false;
};

// Loads and validates checkpoints against the architecture. A refine
// checkpoint whose tensors do not fit the variant raises ConfigError.
Model LoadModel(const TrainConfig& config, const std::string& anchor_path,
                const std::optional<std::string>& refine_path,
                std::optional<uint64_t> expected_hash);

}  // namespace anchorrefine::pipeline

#endif  // ANCHORREFINE_PIPELINE_PIPELINE_H_
