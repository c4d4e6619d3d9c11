#include "anchorrefine/pipeline/pipeline.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"
#include "anchorrefine/diffnet/checkpoint.h"
#include "anchorrefine/diffnet/optimizer.h"

namespace anchorrefine::pipeline {

namespace {

using Eigen::MatrixXd;
using diffnet::ApproximatorSpec;
using diffnet::ParamStore;

constexpr uint64_t kPhase1InitTag = 0x7068617365315f69ULL;
constexpr uint64_t kPhase2InitTag = 0x7068617365325f69ULL;
constexpr uint64_t kPhase1BatchStream = 1;
constexpr uint64_t kPhase2BatchStream = 2;

MatrixXd GatherCols(const MatrixXd& m, const std::vector<int>& idx) {
  MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out.col(i) = m.col(idx[i]);
  return out;
}

MatrixXd GatherLabels(const Eigen::MatrixXi& m, const std::vector<int>& idx) {
  MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) {
    out.col(i) = m.col(idx[i]).cast<double>();
  }
  return out;
}

void CheckFinite(double loss, int phase, int64_t step) {
  if (!std::isfinite(loss)) {
    throw NumericalError("non-finite loss in phase " + std::to_string(phase) +
                         " at step " + std::to_string(step));
  }
}

// Mean-over-batch BCE and its gradient w.r.t. the logits.
double BceWithGrad(const MatrixXd& logits, const MatrixXd& labels,
                   MatrixXd* grad) {
  const double scale = 1.0 / static_cast<double>(logits.size());
  double sum = 0.0;
  grad->resize(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double g = logits(i);
    const double y = labels(i);
    sum += y != 0.0 ? core::Softplus(-g) : core::Softplus(g);
    (*grad)(i) = (core::Sigmoid(g) - y) * scale;
  }
  return sum * scale;
}

std::vector<Eigen::VectorXd> SnapshotValues(const ParamStore& params,
                                            std::string_view prefix) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& [name, t] : params) {
    if (diffnet::HasPrefix(name, prefix)) out.push_back(t.value);
  }
  return out;
}

bool SameValues(const ParamStore& params, std::string_view prefix,
                const std::vector<Eigen::VectorXd>& snapshot) {
  size_t i = 0;
  for (const auto& [name, t] : params) {
    if (!diffnet::HasPrefix(name, prefix)) continue;
    if (i >= snapshot.size() || snapshot[i].size() != t.value.size() ||
        std::memcmp(snapshot[i].data(), t.value.data(),
                    sizeof(double) * t.value.size()) != 0) {
      return false;
    }
    ++i;
  }
  return i == snapshot.size();
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kFull: return "Full";
    case Variant::kNoGripRefine: return "NoGripRefine";
    case Variant::kNaiveGripMSE: return "NaiveGripMSE";
    case Variant::kNoDetach: return "NoDetach";
    case Variant::kExplicitConcat: return "ExplicitConcat";
    case Variant::kAnchorOnlyDeep: return "AnchorOnlyDeep";
    case Variant::kDirectActionPhase2: return "DirectActionPhase2";
  }
  return "Full";
}

Variant ParseVariant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (VariantName(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

void TrainConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid training config: " + what);
  };
  require(horizon >= 1, "H must be >= 1");
  require(arm_width >= 1, "D_arm must be >= 1");
  require(context_dim >= 1, "context_dim must be >= 1");
  require(latent_dim >= 0, "latent_dim must be >= 0");
  for (int w : hidden_widths) require(w >= 1, "hidden widths must be >= 1");
  require(epsilon > 0.0, "epsilon must be > 0");
  require(lambda_grip >= 0.0, "lambda_grip must be >= 0");
  require(phase1_steps >= 1 && phase2_steps >= 1, "steps must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(learning_rate >= 0.0, "learning_rate must be >= 0");
}

Architecture MakeArchitecture(const TrainConfig& config) {
  config.Validate();
  Architecture arch;
  arch.variant = config.variant;
  arch.horizon = config.horizon;
  arch.arm_width = config.arm_width;
  arch.context_dim = config.context_dim;
  arch.epsilon = config.epsilon;

  ApproximatorSpec& anchor = arch.anchor;
  anchor.prefix = "anchor";
  anchor.input_dim = config.context_dim;
  anchor.hidden_widths = config.hidden_widths;
  anchor.arm_dim = arch.arm_dim();
  anchor.grip_dim = config.horizon;
  anchor.activation = config.activation;
  anchor.latent_dim = config.latent_dim;
  anchor.grip_output = diffnet::GripOutput::kLogit;
  if (config.variant == Variant::kAnchorOnlyDeep) {
    for (int& w : anchor.hidden_widths) w = (3 * w + 1) / 2;
    return arch;
  }

  int refine_input = config.context_dim;
  if (config.variant == Variant::kExplicitConcat) {
    refine_input += arch.arm_dim() + config.horizon;
  }
  ApproximatorSpec arm = anchor;
  arm.prefix = "refine.arm";
  arm.input_dim = refine_input;
  arm.grip_dim = 0;
  arch.refine_arm = arm;

  if (config.variant != Variant::kNoGripRefine) {
    ApproximatorSpec grip = anchor;
    grip.prefix = "refine.grip";
    grip.input_dim = refine_input;
    grip.arm_dim = 0;
    grip.grip_output = config.variant == Variant::kNaiveGripMSE
                           ? diffnet::GripOutput::kLinear
                           : diffnet::GripOutput::kTanh;
    arch.refine_grip = grip;
  }
  return arch;
}

void AddAnchorParams(const Architecture& arch, ParamStore& params) {
  diffnet::AddParams(arch.anchor, params);
}

void AddRefineParams(const Architecture& arch, ParamStore& params) {
  if (arch.refine_arm) diffnet::AddParams(*arch.refine_arm, params);
  if (arch.refine_grip) diffnet::AddParams(*arch.refine_grip, params);
}

ParamStore MakeParamStore(const Architecture& arch) {
  ParamStore params;
  AddAnchorParams(arch, params);
  AddRefineParams(arch, params);
  return params;
}

void CheckSchema(const TrainConfig& config, const planarsim::SampleSet& data) {
  if (data.horizon != config.horizon || data.arm_width != config.arm_width ||
      data.context_dim() != config.context_dim) {
    throw ConfigError(
        "dataset schema (H=" + std::to_string(data.horizon) +
        ", D_arm=" + std::to_string(data.arm_width) +
        ", context_dim=" + std::to_string(data.context_dim()) +
        ") does not match config (H=" + std::to_string(config.horizon) +
        ", D_arm=" + std::to_string(config.arm_width) +
        ", context_dim=" + std::to_string(config.context_dim) + ")");
  }
  if (data.size() < 1) throw ConfigError("dataset has no samples");
}

std::vector<double> LossLog::Totals() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.total);
  return out;
}

std::string SerializeLossLog(const LossLog& log,
                             const std::vector<std::string>& metadata) {
  std::string out;
  for (const auto& m : metadata) out += "# " + m + "\n";
  out += "phase,step,arm_loss," + log.grip_column + ",total\n";
  for (const auto& r : log.records) {
    out += std::to_string(r.phase) + "," + std::to_string(r.step) + "," +
           FormatDouble(r.arm_loss) + "," + FormatDouble(r.grip_loss) + "," +
           FormatDouble(r.total) + "\n";
  }
  return out;
}

LossLog ParseLossLog(const std::string& text) {
  LossLog log;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      const std::string prefix = "phase,step,arm_loss,";
      const std::string suffix = ",total";
      const bool ok = line.size() > prefix.size() + suffix.size() &&
                      line.compare(0, prefix.size(), prefix) == 0 &&
                      line.compare(line.size() - suffix.size(), suffix.size(),
                                   suffix) == 0;
      if (!ok) throw ConfigError("loss log: unexpected header '" + line + "'");
      log.grip_column = line.substr(
          prefix.size(), line.size() - prefix.size() - suffix.size());
      if (log.grip_column != kGripLossColumn &&
          log.grip_column != kNaiveGripLossColumn) {
        throw ConfigError("loss log: unknown gripper column '" +
                          log.grip_column + "'");
      }
      header_seen = true;
      continue;
    }
    LossRecord r;
    char tail = 0;
    long long step = 0;
    if (std::sscanf(line.c_str(), "%d,%lld,%lf,%lf,%lf%c", &r.phase, &step,
                    &r.arm_loss, &r.grip_loss, &r.total, &tail) != 5) {
      throw ConfigError("loss log: malformed row '" + line + "'");
    }
    r.step = step;
    log.records.push_back(r);
  }
  if (!header_seen) throw ConfigError("loss log: missing header");
  return log;
}

void WriteLossLog(const std::string& path, const LossLog& log,
                  const std::vector<std::string>& metadata) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write loss log " + path);
  out << SerializeLossLog(log, metadata);
}

LossLog ReadLossLog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open loss log " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseLossLog(ss.str());
}

BatchSampler::BatchSampler(int dataset_size, int batch_size, uint64_t seed,
                           uint64_t stream)
    : dataset_size_(dataset_size),
      batch_size_(batch_size),
      seed_(seed),
      stream_(stream) {
  AR_EXPECT(dataset_size >= 1 && batch_size >= 1, "empty batch sampler");
  Reshuffle();
}

void BatchSampler::Reshuffle() {
  order_.resize(dataset_size_);
  for (int i = 0; i < dataset_size_; ++i) order_[i] = i;
  CounterRng rng(seed_, Mix64(stream_) ^ epoch_);
  for (int i = dataset_size_ - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.Below(static_cast<uint64_t>(i) + 1));
    std::swap(order_[i], order_[j]);
  }
  ++epoch_;
  cursor_ = 0;
}

std::vector<int> BatchSampler::Next() {
  std::vector<int> batch;
  batch.reserve(batch_size_);
  while (static_cast<int>(batch.size()) < batch_size_) {
    if (cursor_ == order_.size()) Reshuffle();
    batch.push_back(order_[cursor_++]);
  }
  return batch;
}

AnchorOutputs RunAnchor(const Architecture& arch, const ParamStore& params,
                        const MatrixXd& contexts) {
  diffnet::ForwardResult fwd = diffnet::Forward(arch.anchor, params, contexts);
  AnchorOutputs out;
  out.arm = std::move(fwd.arm);
  out.logits = std::move(fwd.grip);
  out.probs = out.logits.unaryExpr(
      [](double g) { return core::ClampedProbability(g); });
  return out;
}

MatrixXd RefineInputs(const Architecture& arch, const MatrixXd& contexts,
                      const AnchorOutputs& anchor) {
  if (arch.variant != Variant::kExplicitConcat) return contexts;
  MatrixXd in(contexts.rows() + anchor.arm.rows() + anchor.probs.rows(),
              contexts.cols());
  in << contexts, anchor.arm, anchor.probs;
  return in;
}

ResidualBatch MakeResidualBatch(const TrainConfig& config,
                                const Architecture& arch,
                                const ParamStore& params,
                                const planarsim::SampleSet& batch) {
  ResidualBatch out;
  out.anchor = RunAnchor(arch, params, batch.contexts);
  out.refine_inputs = RefineInputs(arch, batch.contexts, out.anchor);

  // The anchor prediction enters as a plain value: no gradient path exists
  // from these targets back into the anchor.
  if (arch.variant == Variant::kDirectActionPhase2) {
    out.arm_target = batch.arm_targets;
  } else {
    out.arm_target = batch.arm_targets - out.anchor.arm;
  }

  if (arch.refine_grip) {
    out.grip_target.resize(arch.horizon, batch.size());
    for (int b = 0; b < batch.size(); ++b) {
      for (int h = 0; h < arch.horizon; ++h) {
        const int label = batch.grip_labels(h, b);
        if (arch.variant == Variant::kNaiveGripMSE) {
          out.grip_target(h, b) = label - out.anchor.logits(h, b);
        } else {
          out.grip_target(h, b) = core::GripperCorrectionTarget(
              label, out.anchor.probs(h, b), config.epsilon);
        }
      }
    }
  }
  return out;
}

LossLog TrainPhase1(const TrainConfig& config, const Architecture& arch,
                    const planarsim::SampleSet& data, ParamStore& params,
                    const StepCallback& on_step) {
  CheckSchema(config, data);
  if (!params.Contains("anchor.arm_head.weight")) AddAnchorParams(arch, params);
  params.Unfreeze(kAnchorPrefix);
  diffnet::InitParams(arch.anchor, params, Mix64(config.seed ^ kPhase1InitTag));

  diffnet::OptimState opt;
  opt.config.learning_rate = config.learning_rate;
  BatchSampler sampler(data.size(), config.batch_size, config.seed,
                       kPhase1BatchStream);
  const double arm_scale =
      1.0 / static_cast<double>(config.batch_size * arch.arm_dim());

  LossLog log;
  log.records.reserve(config.phase1_steps);
  for (int64_t step = 0; step < config.phase1_steps; ++step) {
    const std::vector<int> idx = sampler.Next();
    const MatrixXd x = GatherCols(data.contexts, idx);
    const MatrixXd target = GatherCols(data.arm_targets, idx);
    const MatrixXd labels = GatherLabels(data.grip_labels, idx);

    diffnet::ForwardResult fwd = diffnet::Forward(arch.anchor, params, x);
    const MatrixXd diff = fwd.arm - target;
    const double arm_loss = diff.squaredNorm() * arm_scale;
    MatrixXd d_grip;
    const double grip_loss = BceWithGrad(fwd.grip, labels, &d_grip);
    const double total = arm_loss + grip_loss;
    CheckFinite(total, 1, step);

    diffnet::Backward(arch.anchor, params, fwd.tape, 2.0 * arm_scale * diff,
                      d_grip);
    diffnet::OptimStep(params, opt);
    log.records.push_back({1, step, arm_loss, grip_loss, total});
    if (on_step) on_step(step + 1, params);
  }
  return log;
}

LossLog TrainPhase2(const TrainConfig& config, const Architecture& arch,
                    const planarsim::SampleSet& data, ParamStore& params,
                    const StepCallback& on_step) {
  CheckSchema(config, data);
  if (!arch.has_refine()) {
    throw ConfigError(std::string("variant ") +
                      std::string(VariantName(arch.variant)) +
                      " has no refinement phase");
  }
  const bool joint = arch.variant == Variant::kNoDetach;

  params.Erase(std::string(kRefinePrefix));
  AddRefineParams(arch, params);
  const uint64_t init_seed = Mix64(config.seed ^ kPhase2InitTag);
  diffnet::InitParams(*arch.refine_arm, params, init_seed);
  if (arch.refine_grip) diffnet::InitParams(*arch.refine_grip, params, init_seed);
  if (arch.anchor.latent_dim > 0) {
    params.CloneParams("anchor.latent", "refine.arm.latent");
    if (arch.refine_grip) {
      params.CloneParams("anchor.latent", "refine.grip.latent");
    }
  }
  params.Unfreeze(kAnchorPrefix);
  if (!joint) params.Freeze(kAnchorPrefix);
  const std::vector<Eigen::VectorXd> anchor_snapshot =
      SnapshotValues(params, kAnchorPrefix);

  // With a frozen anchor the supervision is fixed; build it once.
  ResidualBatch all;
  if (!joint) all = MakeResidualBatch(config, arch, params, data);

  diffnet::OptimState opt;
  opt.config.learning_rate = config.learning_rate;
  BatchSampler sampler(data.size(), config.batch_size, config.seed,
                       kPhase2BatchStream);
  const double arm_scale =
      1.0 / static_cast<double>(config.batch_size * arch.arm_dim());
  const double grip_scale = 1.0 / static_cast<double>(config.batch_size);

  LossLog log;
  if (arch.variant == Variant::kNaiveGripMSE) {
    log.grip_column = std::string(kNaiveGripLossColumn);
  }
  log.records.reserve(config.phase2_steps);
  for (int64_t step = 0; step < config.phase2_steps; ++step) {
    const std::vector<int> idx = sampler.Next();
    MatrixXd inputs, arm_target, grip_target;
    diffnet::ForwardResult anchor_fwd;
    if (joint) {
      const MatrixXd x = GatherCols(data.contexts, idx);
      anchor_fwd = diffnet::Forward(arch.anchor, params, x);
      AnchorOutputs anc;
      anc.arm = anchor_fwd.arm;
      anc.logits = anchor_fwd.grip;
      anc.probs = anc.logits.unaryExpr(
          [](double g) { return core::ClampedProbability(g); });
      inputs = RefineInputs(arch, x, anc);
      arm_target = GatherCols(data.arm_targets, idx) - anc.arm;
      if (arch.refine_grip) {
        grip_target.resize(arch.horizon, config.batch_size);
        for (int b = 0; b < config.batch_size; ++b) {
          for (int h = 0; h < arch.horizon; ++h) {
            grip_target(h, b) = core::GripperCorrectionTarget(
                data.grip_labels(h, idx[b]), anc.probs(h, b), config.epsilon);
          }
        }
      }
    } else {
      inputs = GatherCols(all.refine_inputs, idx);
      arm_target = GatherCols(all.arm_target, idx);
      if (arch.refine_grip) grip_target = GatherCols(all.grip_target, idx);
    }

    diffnet::ForwardResult arm_fwd =
        diffnet::Forward(*arch.refine_arm, params, inputs);
    const MatrixXd arm_diff = arm_fwd.arm - arm_target;
    const double arm_loss = arm_diff.squaredNorm() * arm_scale;
    const MatrixXd d_arm = 2.0 * arm_scale * arm_diff;

    double grip_loss = 0.0;
    diffnet::ForwardResult grip_fwd;
    MatrixXd d_grip;
    if (arch.refine_grip) {
      grip_fwd = diffnet::Forward(*arch.refine_grip, params, inputs);
      const MatrixXd grip_diff = grip_fwd.grip - grip_target;
      grip_loss = grip_diff.squaredNorm() * grip_scale;
      d_grip = (2.0 * config.lambda_grip * grip_scale) * grip_diff;
    }
    const double total = core::Phase2Loss(
        arm_loss, grip_loss, core::LossWeights{config.lambda_grip});
    CheckFinite(total, 2, step);

    diffnet::Backward(*arch.refine_arm, params, arm_fwd.tape, d_arm,
                      MatrixXd());
    if (arch.refine_grip) {
      diffnet::Backward(*arch.refine_grip, params, grip_fwd.tape, MatrixXd(),
                        d_grip);
    }
    if (joint && !config.joint_detach) {
      // Residual target = A - anchor_arm, so dL/d(anchor_arm) = dL/d(refine
      // output).
      diffnet::Backward(arch.anchor, params, anchor_fwd.tape, d_arm,
                        MatrixXd());
    }
    diffnet::OptimStep(params, opt);

    if (!joint && !SameValues(params, kAnchorPrefix, anchor_snapshot)) {
      throw NumericalError("frozen anchor parameters changed at phase-2 step " +
                           std::to_string(step));
    }
    log.records.push_back({2, step, arm_loss, grip_loss, total});
    if (on_step) on_step(step + 1, params);
  }
  return log;
}

ChunkBatch PredictBatch(const Architecture& arch, const ParamStore& params,
                        InferenceMode mode, const MatrixXd& contexts) {
  const AnchorOutputs anc = RunAnchor(arch, params, contexts);
  ChunkBatch out;
  const auto batch = contexts.cols();
  out.grip.resize(arch.horizon, batch);

  if (mode == InferenceMode::kAnchorOnly || !arch.has_refine()) {
    out.arm = anc.arm;
    for (Eigen::Index i = 0; i < anc.probs.size(); ++i) {
      out.grip(i) = core::AnchorDecide(anc.probs(i));
    }
  } else {
    const MatrixXd inputs = RefineInputs(arch, contexts, anc);
    const MatrixXd residual =
        diffnet::Forward(*arch.refine_arm, params, inputs).arm;
    out.arm = arch.variant == Variant::kDirectActionPhase2 ? residual
                                                           : anc.arm + residual;
    if (!arch.refine_grip) {
      for (Eigen::Index i = 0; i < anc.probs.size(); ++i) {
        out.grip(i) = core::AnchorDecide(anc.probs(i));
      }
    } else {
      const MatrixXd r =
          diffnet::Forward(*arch.refine_grip, params, inputs).grip;
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (arch.variant == Variant::kNaiveGripMSE) {
          out.grip(i) = anc.logits(i) + r(i) > core::kDecisionBoundary;
        } else {
          out.grip(i) = core::GripperDecide(anc.probs(i), r(i));
        }
      }
    }
  }
  out.arm = out.arm.cwiseMax(-1.0).cwiseMin(1.0);
  return out;
}

core::ActionChunk Predict(const Architecture& arch, const ParamStore& params,
                          InferenceMode mode, std::span<const double> context) {
  AR_EXPECT(static_cast<int>(context.size()) == arch.context_dim,
            "context has wrong length");
  const MatrixXd x = Eigen::Map<const Eigen::VectorXd>(
      context.data(), static_cast<Eigen::Index>(context.size()));
  const ChunkBatch batch = PredictBatch(arch, params, mode, x);
  core::ActionChunk chunk;
  chunk.arm.resize(arch.horizon, arch.arm_width);
  chunk.grip.resize(arch.horizon);
  for (int h = 0; h < arch.horizon; ++h) {
    for (int d = 0; d < arch.arm_width; ++d) {
      chunk.arm(h, d) = batch.arm(h * arch.arm_width + d, 0);
    }
    chunk.grip[h] = batch.grip(h, 0);
  }
  return chunk;
}

std::vector<std::string> AnchorCheckpointPrefixes() {
  return {std::string(kAnchorPrefix)};
}

std::vector<std::string> RefineCheckpointPrefixes(const Architecture& arch) {
  std::vector<std::string> out{std::string(kRefinePrefix)};
  if (arch.variant == Variant::kNoDetach) out.emplace_back(kAnchorPrefix);
  return out;
}

Model LoadModel(const TrainConfig& config, const std::string& anchor_path,
                const std::optional<std::string>& refine_path,
                std::optional<uint64_t> expected_hash) {
  Model model;
  model.arch = MakeArchitecture(config);
  model.params = MakeParamStore(model.arch);

  const diffnet::Checkpoint anchor = diffnet::ReadCheckpoint(anchor_path);
  for (const auto& [name, t] : anchor.params) {
    if (!diffnet::HasPrefix(name, kAnchorPrefix)) {
      throw ConfigError("anchor checkpoint contains non-anchor tensor " + name);
    }
  }
  diffnet::LoadCheckpoint(anchor, model.params, AnchorCheckpointPrefixes(),
                          expected_hash);

  if (refine_path) {
    if (!model.arch.has_refine()) {
      throw ConfigError(std::string("variant ") +
                        std::string(VariantName(config.variant)) +
                        " does not accept a refine checkpoint");
    }
    const diffnet::Checkpoint refine = diffnet::ReadCheckpoint(*refine_path);
    for (const auto& [name, t] : refine.params) {
      if (diffnet::HasPrefix(name, kAnchorPrefix) &&
          config.variant != Variant::kNoDetach) {
        throw ConfigError("refine checkpoint carries anchor tensors; it was "
                          "trained with NoDetach, not " +
                          std::string(VariantName(config.variant)));
      }
    }
    diffnet::LoadCheckpoint(refine, model.params,
                            RefineCheckpointPrefixes(model.arch),
                            expected_hash);
    model.has_refine = true;
  }
  return model;
}

}  // namespace anchorrefine::pipeline
