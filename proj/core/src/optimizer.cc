#include "anchorrefine/diffnet/optimizer.h"

#include <cmath>

namespace anchorrefine::diffnet {

void OptimStep(ParamStore& params, OptimState& state) {
  ++state.step_count;
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  for (auto& [name, tensor] : params) {
    if (tensor.frozen) {
      tensor.grad.setZero();
      continue;
    }
    auto [m_it, m_new] = state.first_moment.try_emplace(name);
    auto [v_it, v_new] = state.second_moment.try_emplace(name);
    Eigen::VectorXd& m = m_it->second;
    Eigen::VectorXd& v = v_it->second;
    if (m.size() != tensor.size()) m = Eigen::VectorXd::Zero(tensor.size());
    if (v.size() != tensor.size()) v = Eigen::VectorXd::Zero(tensor.size());

    m = c.beta1 * m + (1.0 - c.beta1) * tensor.grad;
    v = c.beta2 * v + (1.0 - c.beta2) * tensor.grad.cwiseAbs2();
    tensor.value.array() -=
        c.learning_rate * (m.array() / correction1) /
        ((v.array() / correction2).sqrt() + c.eps);
    tensor.grad.setZero();
  }
  params.Touch();
}

}  // namespace anchorrefine::diffnet
