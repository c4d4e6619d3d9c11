#include "anchorrefine/core/action.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "anchorrefine/core/errors.h"

namespace anchorrefine::core {

namespace {

void ExpectSameShape(const ArmChunk& a, const ArmChunk& b, const char* op) {
  AR_EXPECT(a.rows() == b.rows() && a.cols() == b.cols(),
            std::string(op) + " shape mismatch " + std::to_string(a.rows()) +
                "x" + std::to_string(a.cols()) + " vs " +
                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

void ExpectOpenUnit(double q) {
  AR_EXPECT(q > 0.0 && q < 1.0,
            "probability must lie in (0, 1), got " + std::to_string(q));
}

void ExpectBinary(int v) {
  AR_EXPECT(v == 0 || v == 1, "gripper label must be 0 or 1");
}

}  // namespace

void ActionChunk::Validate() const {
  AR_EXPECT(arm.rows() >= 1 && arm.cols() >= 1, "empty action chunk");
  AR_EXPECT(static_cast<Eigen::Index>(grip.size()) == arm.rows(),
            "gripper sequence length differs from arm rows");
  AR_EXPECT(arm.allFinite(), "non-finite arm entry");
  for (int g : grip) ExpectBinary(g);
}

GripperHead GripperHead::FromLogits(std::span<const double> logits) {
  GripperHead head;
  head.logits.assign(logits.begin(), logits.end());
  head.probs.reserve(logits.size());
  for (double g : logits) head.probs.push_back(ClampedProbability(g));
  return head;
}

double Sigmoid(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double ClampedProbability(double logit) {
  return std::clamp(Sigmoid(logit), kProbClamp, 1.0 - kProbClamp);
}

ArmChunk ComposeArm(const ArmChunk& anchor, const ArmChunk& residual) {
  ExpectSameShape(anchor, residual, "ComposeArm");
  return anchor + residual;
}

ArmChunk ResidualTarget(const ArmChunk& gt_arm, const ArmChunk& anchor_pred) {
  ExpectSameShape(gt_arm, anchor_pred, "ResidualTarget");
  return gt_arm - anchor_pred;
}

GripDirection GripperDirection(int gt_grip, double q_anc) {
  ExpectBinary(gt_grip);
  ExpectOpenUnit(q_anc);
  return static_cast<GripDirection>(gt_grip - AnchorDecide(q_anc));
}

double GripperCorrectionTarget(int gt_grip, double q_anc, double epsilon) {
  AR_EXPECT(epsilon > 0.0, "margin epsilon must be positive");
  const int s = static_cast<int>(GripperDirection(gt_grip, q_anc));
  if (s == 0) return 0.0;
  return s * (std::abs(q_anc - kDecisionBoundary) + epsilon);
}

int GripperDecide(double q_anc, double r_hat) {
  ExpectOpenUnit(q_anc);
  AR_EXPECT(std::isfinite(r_hat), "non-finite gripper correction");
  return q_anc + r_hat > kDecisionBoundary;
}

double ArmLoss(const ArmChunk& pred, const ArmChunk& target) {
  ExpectSameShape(pred, target, "ArmLoss");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double GripperRefineLoss(std::span<const double> pred,
                         std::span<const double> target) {
  AR_EXPECT(pred.size() == target.size(), "length mismatch");
  double sum = 0.0;
  for (size_t h = 0; h < pred.size(); ++h) {
    const double d = pred[h] - target[h];
    sum += d * d;
  }
  return sum;
}

double GripperBceLoss(std::span<const double> logits,
                      std::span<const int> labels) {
  AR_EXPECT(logits.size() == labels.size(), "length mismatch");
  AR_EXPECT(!logits.empty(), "empty gripper sequence");
  double sum = 0.0;
  for (size_t h = 0; h < logits.size(); ++h) {
    ExpectBinary(labels[h]);
    sum += labels[h] == 1 ? Softplus(-logits[h]) : Softplus(logits[h]);
  }
  return sum / static_cast<double>(logits.size());
}

double Phase2Loss(double arm_refine, double grip_refine,
                  const LossWeights& weights) {
  return arm_refine + weights.lambda_grip * grip_refine;
}

double NaiveGripLoss(std::span<const int> labels,
                     std::span<const double> refined) {
  AR_EXPECT(labels.size() == refined.size(), "length mismatch");
  double sum = 0.0;
  for (size_t h = 0; h < labels.size(); ++h) {
    const double d = labels[h] - refined[h];
    sum += d * d;
  }
  return sum;
}

}  // namespace anchorrefine::core
