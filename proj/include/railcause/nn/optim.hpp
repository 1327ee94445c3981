#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "railcause/nn/tensor.hpp"

namespace railcause::nn {

/// A named, possibly frozen, parameter tensor owned elsewhere.
struct ParamRef {
  std::string name;
  Tensor* tensor = nullptr;
  bool trainable = true;
};

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment buffers keyed by parameter position, plus the step counter.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  const OptimizerConfig& config() const { return config_; }
  std::size_t steps() const { return step_; }

  /// Applies one update to every trainable parameter. `grads[i]` pairs with
  /// `params[i]`. Throws std::domain_error naming the parameter when a
  /// gradient contains a non-finite value; no parameter is modified then.
  void step(const std::vector<ParamRef>& params, const std::vector<const Tensor*>& grads);

 private:
  OptimizerConfig config_;
  std::size_t step_ = 0;
  std::vector<Tensor> first_moment_;
  std::vector<Tensor> second_moment_;
};

}  // namespace railcause::nn
