#include "anchorrefine/diffnet/approximator.h"

#include <cmath>
#include <string>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"

namespace anchorrefine::diffnet {

namespace {

using Eigen::MatrixXd;
using ConstMatMap = Eigen::Map<const MatrixXd>;
using MatMap = Eigen::Map<MatrixXd>;

ConstMatMap Weight(const ParamStore& params, const std::string& name) {
  const Tensor& t = params.At(name);
  return ConstMatMap(t.value.data(), t.shape[0], t.shape[1]);
}

const Eigen::VectorXd& Bias(const ParamStore& params, const std::string& name) {
  return params.At(name).value;
}

void Activate(Activation act, MatrixXd& z) {
  if (act == Activation::kTanh) {
    z = z.array().tanh();
  } else {
    z = z.array().max(0.0);
  }
}

// dL/dz given dL/da and the activation output a.
MatrixXd ActivationGrad(Activation act, const MatrixXd& d_a,
                        const MatrixXd& a) {
  if (act == Activation::kTanh) {
    return (d_a.array() * (1.0 - a.array().square())).matrix();
  }
  return (d_a.array() * (a.array() > 0.0).cast<double>()).matrix();
}

// Accumulates dW += delta * input^T and db += rowsum(delta); returns W^T
// delta when propagate is set.
MatrixXd DenseBackward(ParamStore& params, const std::string& base,
                       const MatrixXd& delta, const MatrixXd& input,
                       bool propagate) {
  Tensor& w = params.At(base + ".weight");
  Tensor& b = params.At(base + ".bias");
  if (!w.frozen) {
    MatMap dw(w.grad.data(), w.shape[0], w.shape[1]);
    dw.noalias() += delta * input.transpose();
  }
  if (!b.frozen) b.grad.noalias() += delta.rowwise().sum();
  MatrixXd out;
  if (propagate) {
    out.noalias() = ConstMatMap(w.value.data(), w.shape[0], w.shape[1])
                        .transpose() * delta;
  }
  return out;
}

}  // namespace

void ApproximatorSpec::Validate() const {
  AR_EXPECT(!prefix.empty(), "approximator prefix is empty");
  AR_EXPECT(input_dim >= 1, prefix + ": input_dim must be >= 1");
  AR_EXPECT(latent_dim >= 0, prefix + ": latent_dim must be >= 0");
  AR_EXPECT(arm_dim >= 0 && grip_dim >= 0, prefix + ": negative head width");
  AR_EXPECT(output_dim() >= 1, prefix + ": no output head");
  for (int w : hidden_widths) {
    AR_EXPECT(w >= 1, prefix + ": hidden width must be >= 1");
  }
}

std::string ApproximatorSpec::LayerName(size_t layer) const {
  return prefix + ".layer" + std::to_string(layer);
}

void AddParams(const ApproximatorSpec& spec, ParamStore& store) {
  spec.Validate();
  if (spec.latent_dim > 0) store.Add(spec.prefix + ".latent", {spec.latent_dim});
  int fan_in = spec.trunk_input_dim();
  for (size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    const int w = spec.hidden_widths[i];
    store.Add(spec.LayerName(i) + ".weight", {w, fan_in});
    store.Add(spec.LayerName(i) + ".bias", {w});
    fan_in = w;
  }
  if (spec.arm_dim > 0) {
    store.Add(spec.prefix + ".arm_head.weight", {spec.arm_dim, fan_in});
    store.Add(spec.prefix + ".arm_head.bias", {spec.arm_dim});
  }
  if (spec.grip_dim > 0) {
    store.Add(spec.prefix + ".grip_head.weight", {spec.grip_dim, fan_in});
    store.Add(spec.prefix + ".grip_head.bias", {spec.grip_dim});
  }
}

void InitParams(const ApproximatorSpec& spec, ParamStore& store,
                uint64_t seed) {
  for (const std::string& name : store.Names(spec.prefix + ".")) {
    Tensor& t = store.At(name);
    CounterRng rng(seed, Fnv1a64(name));
    if (name.ends_with(".latent")) {
      for (auto& v : t.value) v = rng.Uniform(-0.5, 0.5);
    } else if (name.ends_with(".weight")) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(t.shape[1]));
      for (auto& v : t.value) v = rng.Uniform(-bound, bound);
    } else {
      t.value.setZero();
    }
  }
  store.Touch();
}

ForwardResult Forward(const ApproximatorSpec& spec, const ParamStore& params,
                      const MatrixXd& inputs) {
  AR_EXPECT(inputs.rows() == spec.input_dim,
            spec.prefix + ": expected input_dim " +
                std::to_string(spec.input_dim) + ", got " +
                std::to_string(inputs.rows()));
  const Eigen::Index batch = inputs.cols();

  ForwardResult out;
  Tape& tape = out.tape;
  tape.store_id = params.id();
  tape.store_version = params.version();
  tape.prefix = spec.prefix;
  tape.activations.reserve(spec.hidden_widths.size() + 1);

  MatrixXd x0(spec.trunk_input_dim(), batch);
  if (spec.latent_dim > 0) {
    x0.topRows(spec.latent_dim) =
        params.At(spec.prefix + ".latent").value.replicate(1, batch);
  }
  x0.bottomRows(spec.input_dim) = inputs;
  tape.activations.push_back(std::move(x0));

  for (size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    const std::string base = spec.LayerName(i);
    MatrixXd z;
    z.noalias() = Weight(params, base + ".weight") * tape.activations.back();
    z.colwise() += Bias(params, base + ".bias");
    Activate(spec.activation, z);
    tape.activations.push_back(std::move(z));
  }

  const MatrixXd& features = tape.activations.back();
  if (spec.arm_dim > 0) {
    out.arm.noalias() = Weight(params, spec.prefix + ".arm_head.weight") * features;
    out.arm.colwise() += Bias(params, spec.prefix + ".arm_head.bias");
  } else {
    out.arm.resize(0, batch);
  }
  if (spec.grip_dim > 0) {
    out.grip.noalias() =
        Weight(params, spec.prefix + ".grip_head.weight") * features;
    out.grip.colwise() += Bias(params, spec.prefix + ".grip_head.bias");
    if (spec.grip_output == GripOutput::kTanh) out.grip = out.grip.array().tanh();
  } else {
    out.grip.resize(0, batch);
  }
  tape.grip_out = out.grip;
  return out;
}

void Backward(const ApproximatorSpec& spec, ParamStore& params,
              const Tape& tape, const MatrixXd& d_arm, const MatrixXd& d_grip,
              MatrixXd* d_inputs) {
  AR_EXPECT(tape.store_id == params.id() && tape.prefix == spec.prefix,
            spec.prefix + ": tape belongs to a different parameter store");
  AR_EXPECT(tape.store_version == params.version(),
            spec.prefix + ": stale tape (parameters changed since forward)");
  AR_EXPECT(tape.activations.size() == spec.hidden_widths.size() + 1,
            spec.prefix + ": tape does not match spec");
  const MatrixXd& features = tape.activations.back();
  const Eigen::Index batch = features.cols();

  MatrixXd d_features = MatrixXd::Zero(features.rows(), batch);
  if (spec.arm_dim > 0 && d_arm.size() > 0) {
    AR_EXPECT(d_arm.rows() == spec.arm_dim && d_arm.cols() == batch,
              spec.prefix + ": arm gradient shape mismatch");
    d_features += DenseBackward(params, spec.prefix + ".arm_head", d_arm,
                                features, true);
  }
  if (spec.grip_dim > 0 && d_grip.size() > 0) {
    AR_EXPECT(d_grip.rows() == spec.grip_dim && d_grip.cols() == batch,
              spec.prefix + ": gripper gradient shape mismatch");
    MatrixXd d_pre = d_grip;
    if (spec.grip_output == GripOutput::kTanh) {
      d_pre.array() *= 1.0 - tape.grip_out.array().square();
    }
    d_features += DenseBackward(params, spec.prefix + ".grip_head", d_pre,
                                features, true);
  }

  MatrixXd d_act = std::move(d_features);
  for (size_t i = spec.hidden_widths.size(); i-- > 0;) {
    const MatrixXd d_z =
        ActivationGrad(spec.activation, d_act, tape.activations[i + 1]);
    d_act = DenseBackward(params, spec.LayerName(i), d_z, tape.activations[i],
                          true);
  }

  if (spec.latent_dim > 0) {
    Tensor& latent = params.At(spec.prefix + ".latent");
    if (!latent.frozen) {
      latent.grad.noalias() += d_act.topRows(spec.latent_dim).rowwise().sum();
    }
  }
  if (d_inputs != nullptr) *d_inputs = d_act.bottomRows(spec.input_dim);
}

}  // namespace anchorrefine::diffnet
