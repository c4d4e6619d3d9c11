#include "anchorrefine/diffnet/grad_check.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace anchorrefine::diffnet {

GradCheckReport GradCheck(ParamStore& params, const Objective& objective,
                          double h, std::string_view prefix) {
  params.ZeroGrad();
  objective(params, true);
  std::map<std::string, Eigen::VectorXd> analytic;
  for (const auto& [name, t] : params) analytic[name] = t.grad;
  params.ZeroGrad();

  GradCheckReport report;
  for (auto& [name, t] : params) {
    if (t.frozen || !HasPrefix(name, prefix)) continue;
    const Eigen::VectorXd& a = analytic.at(name);
    for (int64_t i = 0; i < t.size(); ++i) {
      const double saved = t.value[i];
      t.value[i] = saved + h;
      params.Touch();
      const double up = objective(params, false);
      t.value[i] = saved - h;
      params.Touch();
      const double down = objective(params, false);
      t.value[i] = saved;
      params.Touch();

      const double numeric = (up - down) / (2.0 * h);
      const double denom =
          std::max({std::abs(a[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(a[i] - numeric) / denom;
      ++report.checked;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = name;
        report.worst_index = i;
      }
    }
  }
  return report;
}

GradCheckReport GradCheck(const ApproximatorSpec& spec, ParamStore& params,
                          const Eigen::MatrixXd& inputs, const OutputLoss& loss,
                          double h) {
  Objective objective = [&](ParamStore& store, bool accumulate) {
    ForwardResult fwd = Forward(spec, store, inputs);
    if (!accumulate) return loss(fwd, nullptr, nullptr);
    Eigen::MatrixXd d_arm, d_grip;
    const double value = loss(fwd, &d_arm, &d_grip);
    Backward(spec, store, fwd.tape, d_arm, d_grip);
    return value;
  };
  return GradCheck(params, objective, h, spec.prefix + ".");
}

}  // namespace anchorrefine::diffnet
