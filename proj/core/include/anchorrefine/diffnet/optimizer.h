#ifndef ANCHORREFINE_DIFFNET_OPTIMIZER_H_
#define ANCHORREFINE_DIFFNET_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Core>

#include "anchorrefine/diffnet/param_store.h"

namespace anchorrefine::diffnet {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment optimizer state. Moments are created lazily per
// parameter name on the first step that touches it.
struct OptimState {
  AdamConfig config;
  int64_t step_count = 0;
  std::map<std::string, Eigen::VectorXd, std::less<>> first_moment;
  std::map<std::string, Eigen::VectorXd, std::less<>> second_moment;
};

// Bias-corrected adaptive-moment update of every non-frozen tensor, then
// zeroes all gradients. Frozen tensors are left bit-identical.
void OptimStep(ParamStore& params, OptimState& state);

}  // namespace anchorrefine::diffnet

#endif  // ANCHORREFINE_DIFFNET_OPTIMIZER_H_
