#include "railcause/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace railcause::nn {

double grad_check(const ScalarFunction& loss, std::vector<Tensor> inputs,
                  const std::vector<Tensor>& analytic, double eps) {
  if (inputs.size() != analytic.size()) {
    throw std::invalid_argument("grad_check: one analytic gradient per input is required");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    require_shape(analytic[i], inputs[i].shape(), "grad_check analytic gradient");
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      const double saved = inputs[i][j];
      inputs[i][j] = saved + eps;
      const double up = loss(inputs);
      inputs[i][j] = saved - eps;
      const double down = loss(inputs);
      inputs[i][j] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i][j];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace railcause::nn
