#pragma once

#include <cstddef>
#include <vector>

#include "railcause/nn/tensor.hpp"
#include "railcause/rng.hpp"

/// Layer primitives with explicit forward and backward passes.
///
/// Matrices follow the row-vector convention: a dense layer computes x W + b
/// with W shaped (inputs x outputs). Sequences are (length x features).
namespace railcause::nn {

enum class Mode { train, infer };

// ReLU. The subgradient at exactly 0 is 0.
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& upstream);

/// Softmax along `axis` (rank-1 input: axis 0; rank-2: axis 0 or 1), with
/// max-subtraction.
Tensor softmax(const Tensor& logits, std::size_t axis = 0);

/// -ln probs[target]. Throws std::out_of_range for a bad target.
double cross_entropy(const Tensor& probs, std::size_t target);

/// Gradient of cross_entropy(softmax(z), target) with respect to z.
Tensor softmax_cross_entropy_backward(const Tensor& probs, std::size_t target);

/// x (D_in) or (B x D_in), W (D_in x D_out), b (D_out).
Tensor dense(const Tensor& x, const Tensor& weights, const Tensor& bias);

struct DenseGrads {
  Tensor input;
  Tensor weights;
  Tensor bias;
};

DenseGrads dense_backward(const Tensor& x, const Tensor& weights, const Tensor& upstream);

/// Inverted dropout. In train mode each entry is zeroed with probability
/// `rate` and survivors are scaled by 1 / (1 - rate); `mask` receives the
/// multiplier applied to each entry. Infer mode is the identity.
/// Throws std::invalid_argument unless 0 <= rate < 1.
Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng, Tensor* mask = nullptr);

/// Applies a mask produced by dropout().
Tensor apply_mask(const Tensor& upstream, const Tensor& mask);

/// Valid 1D convolution, stride 1.
///   x: (L x D), kernels: (F x k x D), bias: (F) -> (L - k + 1) x F
///   out[i, f] = bias[f] + sum_{j<k, d<D} x[i + j, d] * kernels[f, j, d]
Tensor conv1d(const Tensor& x, const Tensor& kernels, const Tensor& bias);

struct Conv1dGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};

Conv1dGrads conv1d_backward(const Tensor& x, const Tensor& kernels, const Tensor& upstream);

struct PoolResult {
  Tensor output;
  /// For every output element, the flat index into the input it came from.
  std::vector<std::size_t> argmax;
};

/// Windowed maxima over axis 0 of an (L x F) tensor. Output length is
/// floor((L - size) / stride) + 1. Ties resolve to the first index.
PoolResult maxpool1d(const Tensor& x, std::size_t size = 5, std::size_t stride = 5);

Tensor maxpool1d_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                          const Tensor& upstream);

double sigmoid(double x);

}  // namespace railcause::nn
