#ifndef ANCHORREFINE_EVALANALYSIS_EVALANALYSIS_H_
#define ANCHORREFINE_EVALANALYSIS_EVALANALYSIS_H_

// Closed-loop evaluation on the planar simulator and the analyses built on
// it: success rates and failure taxonomy, paired transition counts,
// residual compactness, gripper error profiles, loss-curve comparison.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "anchorrefine/core/action.h"
#include "anchorrefine/diffnet/param_store.h"
#include "anchorrefine/pipeline/pipeline.h"
#include "anchorrefine/planarsim/dataset.h"
#include "anchorrefine/planarsim/planarsim.h"

namespace anchorrefine::evalanalysis {

using planarsim::OutcomeTag;

// Maps the current world state to an action chunk.
using ChunkPolicy = std::function<core::ActionChunk(
    const planarsim::WorldState&, const planarsim::TaskSpec&)>;

// The learned policy reads `params` by reference; it must outlive the
// returned function.
ChunkPolicy MakeModelPolicy(const pipeline::Architecture& arch,
                            const diffnet::ParamStore& params,
                            pipeline::InferenceMode mode);
// Plans H expert steps ahead on a copy of the state.
ChunkPolicy MakeExpertPolicy(int horizon);
ChunkPolicy MakeZeroPolicy(int horizon);

// Evaluation seeds live in their own range so they never coincide with
// demonstration seeds.
inline constexpr uint64_t kEvalSeedOffset = uint64_t{1} << 32;
std::vector<uint64_t> EvalSeeds(int count, uint64_t base = 0);

struct RolloutOptions {
  // Actions executed from each chunk before replanning; 0 means all H.
  int execute_k = 0;
};

struct RolloutResult {
  uint64_t seed = 0;
  OutcomeTag outcome = OutcomeTag::kTimeout;
  int steps_used = 0;
  std::vector<planarsim::WorldState> trajectory;  // steps_used + 1 states
  std::vector<planarsim::StepAction> actions;
  std::vector<int> gripper_switch_steps;
  std::optional<int> first_close_step;  // first step commanding close
  std::optional<double> min_dist_at_close;
};

RolloutResult Rollout(const ChunkPolicy& policy, const planarsim::TaskSpec& task,
                      uint64_t seed, const RolloutOptions& options = {});
std::vector<RolloutResult> RolloutAll(const ChunkPolicy& policy,
                                      const planarsim::TaskSpec& task,
                                      std::span<const uint64_t> seeds,
                                      const RolloutOptions& options = {});

struct SuccessSummary {
  int n = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::array<int, planarsim::kAllOutcomes.size()> histogram{};
  // (CloseMiss + EarlyRelease + NeverClosed) / failures; 0 without failures.
  double gripper_failure_share = 0.0;

  int count(OutcomeTag tag) const {
    return histogram[static_cast<size_t>(tag)];
  }
};

SuccessSummary Summarize(std::span<const OutcomeTag> outcomes);
SuccessSummary Summarize(std::span<const RolloutResult> results);

struct TransitionCounts {
  int fs = 0;  // anchor fail, full success
  int sf = 0;
  int ss = 0;
  int ff = 0;

  int total() const { return fs + sf + ss + ff; }
  TransitionCounts& operator+=(const TransitionCounts& o);
};

// Paired tally; throws ContractViolation on length mismatch.
TransitionCounts TallyTransitions(std::span<const OutcomeTag> anchor,
                                  std::span<const OutcomeTag> full);

struct ResidualStats {
  double mean_norm_raw = 0.0;
  double mean_norm_res = 0.0;
  double cov_trace_raw = 0.0;
  double cov_trace_res = 0.0;
  int n_samples = 0;
};

// Columns are samples. Covariance traces use the unbiased (n - 1)
// estimator. Throws ContractViolation with fewer than 2 samples.
ResidualStats ComputeResidualStats(const Eigen::MatrixXd& targets,
                                   const Eigen::MatrixXd& anchor_pred);
ResidualStats ResidualStatsFor(const pipeline::Architecture& arch,
                               const diffnet::ParamStore& params,
                               const planarsim::SampleSet& samples);

struct GripperErrorProfile {
  int window = 0;
  std::vector<int> offsets;        // -W .. W
  std::vector<double> mean_dist;   // NaN where no rollout covers the offset
  std::vector<int> counts;
  double threshold = 0.0;
  int rollouts_used = 0;
  int rollouts_skipped = 0;
  bool empty = true;
  bool below_threshold_at_zero = false;
};

// Aligns each rollout's ee-object distance on its first close command.
// Rollouts that never command a close are skipped.
GripperErrorProfile BuildGripperErrorProfile(
    std::span<const RolloutResult> results, const planarsim::TaskSpec& task,
    int window);

inline constexpr std::array<double, 3> kCrossingFractions = {0.5, 0.2, 0.1};

struct CurveDynamics {
  std::vector<double> smoothed;
  double initial = 0.0;
  // First record index whose smoothed value drops below fraction * initial.
  std::array<std::optional<int64_t>, kCrossingFractions.size()> crossings;
};

// Trailing mean over the last `window` records (fewer at the start).
std::vector<double> SmoothTrailing(std::span<const double> values, int window);
CurveDynamics AnalyzeCurve(std::span<const double> values, int window);

struct LossDynamicsComparison {
  int window = 1;
  CurveDynamics a;
  CurveDynamics b;
};
LossDynamicsComparison CompareLossDynamics(std::span<const double> a,
                                           std::span<const double> b,
                                           int window);

// Fraction of per-step gripper decisions matching the labels.
double GripperDecisionAccuracy(const pipeline::Architecture& arch,
                               const diffnet::ParamStore& params,
                               pipeline::InferenceMode mode,
                               const planarsim::SampleSet& samples);

}  // namespace anchorrefine::evalanalysis

#endif  // ANCHORREFINE_EVALANALYSIS_EVALANALYSIS_H_
