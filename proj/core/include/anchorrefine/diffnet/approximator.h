#ifndef ANCHORREFINE_DIFFNET_APPROXIMATOR_H_
#define ANCHORREFINE_DIFFNET_APPROXIMATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anchorrefine/diffnet/param_store.h"

namespace anchorrefine::diffnet {

enum class Activation { kTanh, kRelu };

// How the gripper head output is exposed.
enum class GripOutput {
  kLogit,   // raw logits (anchor)
  kTanh,    // bounded correction in (-1, 1) (decision-aware refine)
  kLinear,  // unbounded regression (naive ablation)
};

// Feed-forward approximator over [latent || input]. A shared trunk of
// hidden layers feeds two separate linear heads: an arm head (arm_dim
// outputs) and a gripper head (grip_dim outputs). Either head may be
// omitted by giving it zero width.
//
// Parameters live in a ParamStore under `prefix`:
//   <prefix>.latent                     {latent_dim}
//   <prefix>.layer<i>.weight / .bias    {width_i, fan_in} / {width_i}
//   <prefix>.arm_head.weight / .bias
//   <prefix>.grip_head.weight / .bias
struct ApproximatorSpec {
  std::string prefix;
  int input_dim = 0;
  std::vector<int> hidden_widths;
  int arm_dim = 0;
  int grip_dim = 0;
  Activation activation = Activation::kTanh;
  int latent_dim = 0;
  GripOutput grip_output = GripOutput::kLogit;

  int output_dim() const { return arm_dim + grip_dim; }
  int trunk_input_dim() const { return latent_dim + input_dim; }
  int trunk_output_dim() const {
    return hidden_widths.empty() ? trunk_input_dim() : hidden_widths.back();
  }

  void Validate() const;
  std::string LayerName(size_t layer) const;
};

// Creates every tensor of `spec` in `store` (zero-valued).
void AddParams(const ApproximatorSpec& spec, ParamStore& store);

// Fan-in scaled uniform init: weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
// biases zero, latent ~ U(-0.5, 0.5). Each tensor draws from a stream keyed
// by (seed, tensor name), so adding or removing other tensors never changes
// its values.
void InitParams(const ApproximatorSpec& spec, ParamStore& store, uint64_t seed);

// Record of a batched forward pass, sufficient for exact reverse mode.
struct Tape {
  uint64_t store_id = 0;
  uint64_t store_version = 0;
  std::string prefix;
  // activations[0] is the trunk input [latent; input]; activations[i + 1] is
  // the output of hidden layer i.
  std::vector<Eigen::MatrixXd> activations;
  Eigen::MatrixXd grip_out;  // post-transform gripper output
};

// Batched outputs; columns are samples.
struct ForwardResult {
  Eigen::MatrixXd arm;   // arm_dim x B
  Eigen::MatrixXd grip;  // grip_dim x B, after the GripOutput transform
  Tape tape;
};

// `inputs` is input_dim x B.
ForwardResult Forward(const ApproximatorSpec& spec, const ParamStore& params,
                      const Eigen::MatrixXd& inputs);

// Accumulates dLoss/dParam into params.grad for every non-frozen tensor of
// `spec`, given the loss gradient with respect to the two outputs (pass an
// empty matrix for a head that does not receive gradient). When d_inputs is
// non-null it receives dLoss/dInputs (input_dim x B).
//
// Throws ContractViolation if the tape does not come from this store or the
// store has been modified since the forward pass.
void Backward(const ApproximatorSpec& spec, ParamStore& params,
              const Tape& tape, const Eigen::MatrixXd& d_arm,
              const Eigen::MatrixXd& d_grip,
              Eigen::MatrixXd* d_inputs = nullptr);

}  // namespace anchorrefine::diffnet

#endif  // ANCHORREFINE_DIFFNET_APPROXIMATOR_H_
