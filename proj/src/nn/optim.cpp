#include "railcause/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace railcause::nn {

void Optimizer::step(const std::vector<ParamRef>& params, const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("optimizer: parameter and gradient counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].trainable) continue;
    require_shape(*grads[i], params[i].tensor->shape(), params[i].name.c_str());
    if (!grads[i]->all_finite()) {
      throw std::domain_error("optimizer: non-finite gradient for parameter '" +
                              params[i].name + "'");
    }
  }
  ++step_;
  if (config_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params[i].trainable) continue;
      Tensor& p = *params[i].tensor;
      const Tensor& g = *grads[i];
      for (std::size_t j = 0; j < p.size(); ++j) p[j] -= config_.learning_rate * g[j];
    }
    return;
  }

  if (first_moment_.empty()) {
    for (const auto& p : params) {
      first_moment_.emplace_back(p.tensor->shape());
      second_moment_.emplace_back(p.tensor->shape());
    }
  } else if (first_moment_.size() != params.size()) {
    throw std::invalid_argument("optimizer: parameter list changed between steps");
  }
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].trainable) continue;
    Tensor& p = *params[i].tensor;
    const Tensor& g = *grads[i];
    Tensor& m = first_moment_[i];
    Tensor& v = second_moment_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace railcause::nn
