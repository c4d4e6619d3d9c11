#ifndef ANCHORREFINE_CORE_ACTION_H_
#define ANCHORREFINE_CORE_ACTION_H_

// Action-chunk algebra for the anchor/refine factorization: composing arm
// residuals, building residual and gripper-correction targets, the corrected
// gripper decision rule, and the loss functions used by both training phases.
//
// Everything here is pure and reentrant.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace anchorrefine::core {

// H rows (chunk steps) by D_arm columns. Row-major so that the flattened
// layout is step-major: index h * D_arm + d.
using ArmChunk =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ActionChunk {
  ArmChunk arm;           // normalized per-step deltas
  std::vector<int> grip;  // 0 = open, 1 = closed

  int horizon() const { return static_cast<int>(arm.rows()); }
  int arm_width() const { return static_cast<int>(arm.cols()); }

  // Throws ContractViolation when the invariants do not hold.
  void Validate() const;
};

// Anchor gripper logits and their probabilities. Probabilities are clamped
// to [1e-12, 1 - 1e-12] so they stay strictly inside (0, 1) even for
// saturated logits.
struct GripperHead {
  std::vector<double> logits;
  std::vector<double> probs;

  static GripperHead FromLogits(std::span<const double> logits);
};

enum class GripDirection : int { kTowardOpen = -1, kNone = 0, kTowardClose = 1 };

struct LossWeights {
  double lambda_grip = 0.01;
};

inline constexpr double kDecisionBoundary = 0.5;
inline constexpr double kDefaultGripMargin = 0.05;
inline constexpr double kProbClamp = 1e-12;

double Sigmoid(double logit);
// log(1 + exp(x)) without overflow.
double Softplus(double x);
// Sigmoid clamped to [kProbClamp, 1 - kProbClamp].
double ClampedProbability(double logit);

ArmChunk ComposeArm(const ArmChunk& anchor, const ArmChunk& residual);

// gt - anchor_pred. The anchor prediction enters as a value, so there is no
// gradient path back into whatever produced it.
ArmChunk ResidualTarget(const ArmChunk& gt_arm, const ArmChunk& anchor_pred);

GripDirection GripperDirection(int gt_grip, double q_anc);

// s * (|q - 0.5| + epsilon) with s = GripperDirection(gt, q).
double GripperCorrectionTarget(int gt_grip, double q_anc, double epsilon);

// 1 iff q + r > 0.5 (strict).
int GripperDecide(double q_anc, double r_hat);

// Hard decision of the uncorrected anchor.
inline int AnchorDecide(double q_anc) { return q_anc > kDecisionBoundary; }

// Mean of squared entrywise errors.
double ArmLoss(const ArmChunk& pred, const ArmChunk& target);

// Sum over the chunk of squared differences.
double GripperRefineLoss(std::span<const double> pred,
                         std::span<const double> target);

// Mean binary cross-entropy over the chunk: softplus(-g) for label 1,
// softplus(g) for label 0.
double GripperBceLoss(std::span<const double> logits,
                      std::span<const int> labels);

double Phase2Loss(double arm_refine, double grip_refine,
                  const LossWeights& weights);

// Naive gripper regression used by one ablation: sum_h (y - refined)^2 where
// refined = anchor logit + predicted correction.
double NaiveGripLoss(std::span<const int> labels,
                     std::span<const double> refined);

}  // namespace anchorrefine::core

#endif  // ANCHORREFINE_CORE_ACTION_H_
