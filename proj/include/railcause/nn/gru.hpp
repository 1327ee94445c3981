#pragma once

#include <cstddef>
#include <string>

#include "railcause/nn/tensor.hpp"

namespace railcause::nn {

/// Gated recurrent unit weights (row-vector convention):
///   z_t = sigmoid(x_t W_z + h_{t-1} U_z + b_z)
///   r_t = sigmoid(x_t W_r + h_{t-1} U_r + b_r)
///   h_t = z_t * h_{t-1} + (1 - z_t) * tanh(x_t W_h + (r_t * h_{t-1}) U_h + b_h)
struct GruParams {
  Tensor w_z, w_r, w_h;  // D_in x D_h
  Tensor u_z, u_r, u_h;  // D_h x D_h
  Tensor b_z, b_r, b_h;  // D_h

  GruParams() = default;
  /// All-zero parameters.
  GruParams(std::size_t input_size, std::size_t hidden_size);

  std::size_t input_size() const { return w_z.dim(0); }
  std::size_t hidden_size() const { return w_z.dim(1); }

  /// Throws std::invalid_argument when the nine shapes disagree.
  void validate() const;

  template <class F>
  void for_each(F&& f) {
    f("w_z", w_z); f("w_r", w_r); f("w_h", w_h);
    f("u_z", u_z); f("u_r", u_r); f("u_h", u_h);
    f("b_z", b_z); f("b_r", b_r); f("b_h", b_h);
  }
};

/// Activations saved by the forward pass for backpropagation through time.
struct GruCache {
  Tensor input;      // L x D_in
  Tensor h0;         // D_h
  Tensor update;     // z, L x D_h
  Tensor reset;      // r, L x D_h
  Tensor candidate;  // tanh(...), L x D_h
  Tensor hidden;     // h, L x D_h
};

/// One step. `x` is (D_in), `h_prev` is (D_h).
Tensor gru_cell(const Tensor& x, const Tensor& h_prev, const GruParams& p,
                GruCache* cache = nullptr);

/// Runs the cell left to right over the rows of `inputs` (L x D_in) and
/// returns every hidden state (L x D_h). `h0` defaults to zeros; L may be 0.
Tensor gru_layer(const Tensor& inputs, const GruParams& p, const Tensor* h0 = nullptr,
                 GruCache* cache = nullptr);

struct GruInputGrads {
  Tensor input;    // same shape as the forward input
  Tensor initial;  // gradient for h0 / h_prev
};

/// `upstream` holds dLoss/dh_t for every step (L x D_h, or D_h for a
/// single cell). Parameter gradients are added into `param_grads`.
GruInputGrads gru_backward(const GruCache& cache, const GruParams& p, const Tensor& upstream,
                           GruParams& param_grads);

}  // namespace railcause::nn
