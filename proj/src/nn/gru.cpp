#include "railcause/nn/gru.hpp"

#include <cmath>
#include <stdexcept>

#include "eigen_view.hpp"
#include "railcause/nn/ops.hpp"

namespace railcause::nn {

using detail::matrix_view;
using detail::RowMatrix;
using detail::RowVector;
using detail::vector_view;

GruParams::GruParams(std::size_t input_size, std::size_t hidden_size)
    : w_z({input_size, hidden_size}),
      w_r({input_size, hidden_size}),
      w_h({input_size, hidden_size}),
      u_z({hidden_size, hidden_size}),
      u_r({hidden_size, hidden_size}),
      u_h({hidden_size, hidden_size}),
      b_z({hidden_size}),
      b_r({hidden_size}),
      b_h({hidden_size}) {}

void GruParams::validate() const {
  if (w_z.rank() != 2) throw std::invalid_argument("gru: W_z must be rank 2");
  const std::size_t in = w_z.dim(0);
  const std::size_t h = w_z.dim(1);
  require_shape(w_r, {in, h}, "gru W_r");
  require_shape(w_h, {in, h}, "gru W_h");
  require_shape(u_z, {h, h}, "gru U_z");
  require_shape(u_r, {h, h}, "gru U_r");
  require_shape(u_h, {h, h}, "gru U_h");
  require_shape(b_z, {h}, "gru b_z");
  require_shape(b_r, {h}, "gru b_r");
  require_shape(b_h, {h}, "gru b_h");
}

namespace {

Tensor run(const Tensor& inputs, const GruParams& p, const Tensor* h0, GruCache* cache) {
  p.validate();
  const std::size_t din = p.input_size();
  const std::size_t dh = p.hidden_size();
  if (inputs.rank() != 2 || inputs.dim(1) != din) {
    throw std::invalid_argument("gru: input shape " + to_string(inputs.shape()) +
                                " does not match D_in = " + std::to_string(din));
  }
  const std::size_t steps = inputs.dim(0);
  Tensor h_init({dh});
  if (h0) {
    require_shape(*h0, {dh}, "gru initial state");
    h_init = *h0;
  }

  const auto X = matrix_view(inputs, steps, din);
  const RowMatrix xz = X * matrix_view(p.w_z, din, dh);
  const RowMatrix xr = X * matrix_view(p.w_r, din, dh);
  const RowMatrix xh = X * matrix_view(p.w_h, din, dh);
  const auto Uz = matrix_view(p.u_z, dh, dh);
  const auto Ur = matrix_view(p.u_r, dh, dh);
  const auto Uh = matrix_view(p.u_h, dh, dh);

  Tensor z({steps, dh}), r({steps, dh}), c({steps, dh}), h({steps, dh});
  RowVector prev = vector_view(h_init);
  RowVector az(dh), ar(dh), ac(dh);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    az.noalias() = xz.row(ti) + prev * Uz + vector_view(p.b_z);
    ar.noalias() = xr.row(ti) + prev * Ur + vector_view(p.b_r);
    for (std::size_t j = 0; j < dh; ++j) {
      z.at(t, j) = sigmoid(az[j]);
      r.at(t, j) = sigmoid(ar[j]);
    }
    RowVector rh(dh);
    for (std::size_t j = 0; j < dh; ++j) rh[j] = r.at(t, j) * prev[j];
    ac.noalias() = xh.row(ti) + rh * Uh + vector_view(p.b_h);
    for (std::size_t j = 0; j < dh; ++j) {
      c.at(t, j) = std::tanh(ac[j]);
      h.at(t, j) = z.at(t, j) * prev[j] + (1.0 - z.at(t, j)) * c.at(t, j);
      prev[j] = h.at(t, j);
    }
  }
  if (cache) {
    cache->input = inputs;
    cache->h0 = std::move(h_init);
    cache->update = std::move(z);
    cache->reset = std::move(r);
    cache->candidate = std::move(c);
    cache->hidden = h;
  }
  return h;
}

}  // namespace

Tensor gru_cell(const Tensor& x, const Tensor& h_prev, const GruParams& p, GruCache* cache) {
  if (x.rank() != 1) throw std::invalid_argument("gru_cell: x must be rank 1");
  Tensor out = run(x.reshaped({1, x.size()}), p, &h_prev, cache);
  if (cache) cache->input = x;
  return out.reshaped({out.size()});
}

Tensor gru_layer(const Tensor& inputs, const GruParams& p, const Tensor* h0, GruCache* cache) {
  return run(inputs, p, h0, cache);
}

GruInputGrads gru_backward(const GruCache& cache, const GruParams& p, const Tensor& upstream,
                           GruParams& param_grads) {
  const std::size_t steps = cache.hidden.dim(0);
  const std::size_t din = p.input_size();
  const std::size_t dh = p.hidden_size();
  if (upstream.size() != steps * dh) {
    throw std::invalid_argument("gru_backward: upstream shape " + to_string(upstream.shape()));
  }
  const auto Uz = matrix_view(p.u_z, dh, dh);
  const auto Ur = matrix_view(p.u_r, dh, dh);
  const auto Uh = matrix_view(p.u_h, dh, dh);

  RowMatrix daz(steps, dh), dar(steps, dh), dac(steps, dh);
  RowMatrix rh_all(steps, dh), prev_all(steps, dh);
  RowVector carry = RowVector::Zero(dh);
  for (std::size_t s = steps; s-- > 0;) {
    const auto ti = static_cast<Eigen::Index>(s);
    RowVector prev(dh);
    for (std::size_t j = 0; j < dh; ++j) {
      prev[j] = s == 0 ? cache.h0[j] : cache.hidden.at(s - 1, j);
    }
    RowVector dh_t = carry;
    for (std::size_t j = 0; j < dh; ++j) dh_t[j] += upstream[s * dh + j];

    RowVector dprev(dh);
    for (std::size_t j = 0; j < dh; ++j) {
      const double z = cache.update.at(s, j);
      const double c = cache.candidate.at(s, j);
      daz(ti, j) = dh_t[j] * (prev[j] - c) * z * (1.0 - z);
      dac(ti, j) = dh_t[j] * (1.0 - z) * (1.0 - c * c);
      dprev[j] = dh_t[j] * z;
      rh_all(ti, j) = cache.reset.at(s, j) * prev[j];
    }
    const RowVector drh = dac.row(ti) * Uh.transpose();
    for (std::size_t j = 0; j < dh; ++j) {
      const double r = cache.reset.at(s, j);
      dar(ti, j) = drh[j] * prev[j] * r * (1.0 - r);
      dprev[j] += drh[j] * r;
    }
    dprev.noalias() += daz.row(ti) * Uz.transpose() + dar.row(ti) * Ur.transpose();
    prev_all.row(ti) = prev;
    carry = dprev;
  }

  const auto X = matrix_view(cache.input, steps, din);
  matrix_view(param_grads.w_z, din, dh).noalias() += X.transpose() * daz;
  matrix_view(param_grads.w_r, din, dh).noalias() += X.transpose() * dar;
  matrix_view(param_grads.w_h, din, dh).noalias() += X.transpose() * dac;
  matrix_view(param_grads.u_z, dh, dh).noalias() += prev_all.transpose() * daz;
  matrix_view(param_grads.u_r, dh, dh).noalias() += prev_all.transpose() * dar;
  matrix_view(param_grads.u_h, dh, dh).noalias() += rh_all.transpose() * dac;
  vector_view(param_grads.b_z) += daz.colwise().sum();
  vector_view(param_grads.b_r) += dar.colwise().sum();
  vector_view(param_grads.b_h) += dac.colwise().sum();

  GruInputGrads g{Tensor(cache.input.shape()), Tensor({dh})};
  matrix_view(g.input, steps, din).noalias() =
      daz * matrix_view(p.w_z, din, dh).transpose() +
      dar * matrix_view(p.w_r, din, dh).transpose() +
      dac * matrix_view(p.w_h, din, dh).transpose();
  vector_view(g.initial) = carry;
  return g;
}

}  // namespace railcause::nn
