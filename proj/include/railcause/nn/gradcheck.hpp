#pragma once

#include <functional>
#include <vector>

#include "railcause/nn/tensor.hpp"

namespace railcause::nn {

using ScalarFunction = std::function<double(const std::vector<Tensor>&)>;

/// Compares `analytic[i]` (dLoss/dinputs[i]) against central differences
/// (f(x + eps) - f(x - eps)) / (2 eps), coordinate by coordinate. Returns the
/// largest |a - n| / max(|a|, |n|, 1e-8).
double grad_check(const ScalarFunction& loss, std::vector<Tensor> inputs,
                  const std::vector<Tensor>& analytic, double eps = 1e-5);

}  // namespace railcause::nn
