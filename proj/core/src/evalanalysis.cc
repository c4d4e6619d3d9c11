#include "anchorrefine/evalanalysis/evalanalysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anchorrefine/core/errors.h"

namespace anchorrefine::evalanalysis {

std::vector<uint64_t> EvalSeeds(int count, uint64_t base) {
  AR_EXPECT(count >= 0, "negative seed count");
  std::vector<uint64_t> seeds(count);
  for (int i = 0; i < count; ++i) seeds[i] = kEvalSeedOffset + base + i;
  return seeds;
}

RolloutResult Rollout(const ChunkPolicy& policy, const planarsim::TaskSpec& task,
                      uint64_t seed, const RolloutOptions& options) {
  AR_EXPECT(options.execute_k >= 0, "execute_k must be >= 0");
  planarsim::Simulator sim(task);
  RolloutResult out;
  out.seed = seed;
  out.trajectory.push_back(sim.Reset(seed));

  while (!sim.done()) {
    const core::ActionChunk chunk = policy(sim.state(), task);
    chunk.Validate();
    const int horizon = static_cast<int>(chunk.grip.size());
    const int k = options.execute_k == 0 ? horizon
                                         : std::min(options.execute_k, horizon);
    for (int h = 0; h < k && !sim.done(); ++h) {
      planarsim::StepAction a;
      for (int d = 0; d < planarsim::kArmWidth; ++d) a.arm[d] = chunk.arm(h, d);
      a.grip = chunk.grip[h];
      if (a.grip == 1 && !out.first_close_step) {
        out.first_close_step = sim.state().step_index;
        out.min_dist_at_close = planarsim::Distance(sim.state().ee,
                                                    sim.state().obj);
      }
      const planarsim::StepResult r = sim.Step(a);
      out.actions.push_back(a);
      out.trajectory.push_back(r.state);
      if (r.done) out.outcome = *r.outcome;
    }
  }
  out.steps_used = static_cast<int>(out.actions.size());
  out.gripper_switch_steps = sim.episode().gripper_switch_steps;
  return out;
}

std::vector<RolloutResult> RolloutAll(const ChunkPolicy& policy,
                                      const planarsim::TaskSpec& task,
                                      std::span<const uint64_t> seeds,
                                      const RolloutOptions& options) {
  std::vector<RolloutResult> out;
  out.reserve(seeds.size());
  for (uint64_t s : seeds) out.push_back(Rollout(policy, task, s, options));
  return out;
}

SuccessSummary Summarize(std::span<const OutcomeTag> outcomes) {
  SuccessSummary s;
  s.n = static_cast<int>(outcomes.size());
  for (OutcomeTag t : outcomes) ++s.histogram[static_cast<size_t>(t)];
  s.successes = s.count(OutcomeTag::kSuccess);
  s.success_rate = s.n == 0 ? 0.0 : static_cast<double>(s.successes) / s.n;
  const int failures = s.n - s.successes;
  const int grip = s.count(OutcomeTag::kGripCloseMiss) +
                   s.count(OutcomeTag::kGripEarlyRelease) +
                   s.count(OutcomeTag::kGripNeverClosed);
  s.gripper_failure_share =
      failures == 0 ? 0.0 : static_cast<double>(grip) / failures;
  return s;
}

SuccessSummary Summarize(std::span<const RolloutResult> results) {
  std::vector<OutcomeTag> outcomes;
  outcomes.reserve(results.size());
  for (const auto& r : results) outcomes.push_back(r.outcome);
  return Summarize(outcomes);
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& o) {
  fs += o.fs;
  sf += o.sf;
  ss += o.ss;
  ff += o.ff;
  return *this;
}

TransitionCounts TallyTransitions(std::span<const OutcomeTag> anchor,
                                  std::span<const OutcomeTag> full) {
  AR_EXPECT(anchor.size() == full.size(), "unpaired outcome lists");
  TransitionCounts c;
  for (size_t i = 0; i < anchor.size(); ++i) {
    const bool a = anchor[i] == OutcomeTag::kSuccess;
    const bool f = full[i] == OutcomeTag::kSuccess;
    if (a && f) {
      ++c.ss;
    } else if (a) {
      ++c.sf;
    } else if (f) {
      ++c.fs;
    } else {
      ++c.ff;
    }
  }
  return c;
}

namespace {

void NormAndTrace(const Eigen::MatrixXd& x, double* mean_norm,
                  double* cov_trace) {
  const auto n = static_cast<double>(x.cols());
  *mean_norm = x.colwise().norm().sum() / n;
  const Eigen::VectorXd mean = x.rowwise().mean();
  *cov_trace = (x.colwise() - mean).squaredNorm() / (n - 1.0);
}

}  // namespace

ResidualStats ComputeResidualStats(const Eigen::MatrixXd& targets,
                                   const Eigen::MatrixXd& anchor_pred) {
  AR_EXPECT(targets.cols() >= 2, "need at least 2 samples");
  AR_EXPECT(targets.rows() == anchor_pred.rows() &&
                targets.cols() == anchor_pred.cols(),
            "target/prediction shape mismatch");
  ResidualStats s;
  s.n_samples = static_cast<int>(targets.cols());
  NormAndTrace(targets, &s.mean_norm_raw, &s.cov_trace_raw);
  NormAndTrace(targets - anchor_pred, &s.mean_norm_res, &s.cov_trace_res);
  return s;
}

ResidualStats ResidualStatsFor(const pipeline::Architecture& arch,
                               const diffnet::ParamStore& params,
                               const planarsim::SampleSet& samples) {
  const pipeline::AnchorOutputs anc =
      pipeline::RunAnchor(arch, params, samples.contexts);
  return ComputeResidualStats(samples.arm_targets, anc.arm);
}

GripperErrorProfile BuildGripperErrorProfile(
    std::span<const RolloutResult> results, const planarsim::TaskSpec& task,
    int window) {
  AR_EXPECT(window >= 1, "window must be >= 1");
  GripperErrorProfile p;
  p.window = window;
  p.threshold = task.grasp_radius;
  const int width = 2 * window + 1;
  std::vector<double> sums(width, 0.0);
  p.counts.assign(width, 0);
  for (int o = -window; o <= window; ++o) p.offsets.push_back(o);

  for (const auto& r : results) {
    if (!r.first_close_step) {
      ++p.rollouts_skipped;
      continue;
    }
    ++p.rollouts_used;
    const int center = *r.first_close_step;
    for (int i = 0; i < width; ++i) {
      const int t = center + p.offsets[i];
      if (t < 0 || t >= static_cast<int>(r.trajectory.size())) continue;
      sums[i] += planarsim::Distance(r.trajectory[t].ee, r.trajectory[t].obj);
      ++p.counts[i];
    }
  }
  p.mean_dist.resize(width);
  for (int i = 0; i < width; ++i) {
    p.mean_dist[i] = p.counts[i] == 0
                         ? std::numeric_limits<double>::quiet_NaN()
                         : sums[i] / p.counts[i];
  }
  p.empty = p.rollouts_used == 0;
  p.below_threshold_at_zero = !p.empty && p.mean_dist[window] < p.threshold;
  return p;
}

std::vector<double> SmoothTrailing(std::span<const double> values,
                                   int window) {
  AR_EXPECT(window >= 1, "window must be >= 1");
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const size_t lo = i + 1 >= static_cast<size_t>(window) ? i + 1 - window : 0;
    double sum = 0.0;
    for (size_t j = lo; j <= i; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(i + 1 - lo);
  }
  return out;
}

CurveDynamics AnalyzeCurve(std::span<const double> values, int window) {
  CurveDynamics c;
  c.smoothed = SmoothTrailing(values, window);
  if (c.smoothed.empty()) return c;
  c.initial = c.smoothed.front();
  for (size_t f = 0; f < kCrossingFractions.size(); ++f) {
    const double level = kCrossingFractions[f] * c.initial;
    for (size_t i = 0; i < c.smoothed.size(); ++i) {
      if (c.smoothed[i] < level) {
        c.crossings[f] = static_cast<int64_t>(i);
        break;
      }
    }
  }
  return c;
}

LossDynamicsComparison CompareLossDynamics(std::span<const double> a,
                                           std::span<const double> b,
                                           int window) {
  LossDynamicsComparison out;
  out.window = window;
  out.a = AnalyzeCurve(a, window);
  out.b = AnalyzeCurve(b, window);
  return out;
}

double GripperDecisionAccuracy(const pipeline::Architecture& arch,
                               const diffnet::ParamStore& params,
                               pipeline::InferenceMode mode,
                               const planarsim::SampleSet& samples) {
  AR_EXPECT(samples.size() >= 1, "empty sample set");
  const pipeline::ChunkBatch batch =
      pipeline::PredictBatch(arch, params, mode, samples.contexts);
  const auto correct = (batch.grip.array() == samples.grip_labels.array()).count();
  return static_cast<double>(correct) /
         static_cast<double>(samples.grip_labels.size());
}

}  // namespace anchorrefine::evalanalysis
