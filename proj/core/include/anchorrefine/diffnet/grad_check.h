#ifndef ANCHORREFINE_DIFFNET_GRAD_CHECK_H_
#define ANCHORREFINE_DIFFNET_GRAD_CHECK_H_

#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "anchorrefine/diffnet/approximator.h"
#include "anchorrefine/diffnet/param_store.h"

namespace anchorrefine::diffnet {

// Evaluates a scalar loss of the parameters. When `accumulate_grads` is set
// it must also add dLoss/dParam into the store's gradients.
using Objective = std::function<double(ParamStore&, bool accumulate_grads)>;

// Loss over the outputs of one approximator; fills d_arm / d_grip with the
// loss gradient when they are non-null.
using OutputLoss = std::function<double(
    const ForwardResult&, Eigen::MatrixXd* d_arm, Eigen::MatrixXd* d_grip)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  int64_t worst_index = -1;
  int64_t checked = 0;
};

// Compares analytic gradients against central differences
// (L(theta + h) - L(theta - h)) / 2h for every non-frozen scalar under
// `prefix`. Relative error uses max(|analytic|, |numeric|, 1e-8) as
// denominator.
GradCheckReport GradCheck(ParamStore& params, const Objective& objective,
                          double h = 1e-5, std::string_view prefix = "");

// Checks only the tensors of `spec`.
GradCheckReport GradCheck(const ApproximatorSpec& spec, ParamStore& params,
                          const Eigen::MatrixXd& inputs, const OutputLoss& loss,
                          double h = 1e-5);

}  // namespace anchorrefine::diffnet

#endif  // ANCHORREFINE_DIFFNET_GRAD_CHECK_H_
