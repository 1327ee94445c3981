#include "railcause/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eigen_view.hpp"

namespace railcause::nn {

using detail::matrix_view;
using detail::vector_view;

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& upstream) {
  require_shape(upstream, x.shape(), "relu_backward upstream");
  Tensor g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? upstream[i] : 0.0;
  return g;
}

namespace {

void softmax_strided(const double* in, double* out, std::size_t n, std::size_t stride) {
  double m = in[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, in[i * stride]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i * stride] = std::exp(in[i * stride] - m);
    sum += out[i * stride];
  }
  for (std::size_t i = 0; i < n; ++i) out[i * stride] /= sum;
}

}  // namespace

Tensor softmax(const Tensor& logits, std::size_t axis) {
  Tensor out(logits.shape());
  if (logits.empty()) return out;
  if (logits.rank() == 1) {
    if (axis != 0) throw std::invalid_argument("softmax: axis out of range");
    softmax_strided(logits.data(), out.data(), logits.size(), 1);
  } else if (logits.rank() == 2) {
    const std::size_t rows = logits.dim(0);
    const std::size_t cols = logits.dim(1);
    if (axis == 1) {
      for (std::size_t r = 0; r < rows; ++r) {
        softmax_strided(logits.data() + r * cols, out.data() + r * cols, cols, 1);
      }
    } else if (axis == 0) {
      for (std::size_t c = 0; c < cols; ++c) {
        softmax_strided(logits.data() + c, out.data() + c, rows, cols);
      }
    } else {
      throw std::invalid_argument("softmax: axis out of range");
    }
  } else {
    throw std::invalid_argument("softmax: rank must be 1 or 2");
  }
  return out;
}

double cross_entropy(const Tensor& probs, std::size_t target) {
  if (target >= probs.size()) {
    throw std::out_of_range("cross_entropy: target " + std::to_string(target) +
                            " outside [0, " + std::to_string(probs.size()) + ")");
  }
  return -std::log(probs[target]);
}

Tensor softmax_cross_entropy_backward(const Tensor& probs, std::size_t target) {
  if (target >= probs.size()) throw std::out_of_range("softmax_cross_entropy_backward: target");
  Tensor g = probs;
  g[target] -= 1.0;
  return g;
}

namespace {

struct DenseDims {
  std::size_t batch;
  std::size_t in;
  std::size_t out;
};

DenseDims dense_dims(const Tensor& x, const Tensor& weights) {
  if (weights.rank() != 2) throw std::invalid_argument("dense: weights must be rank 2");
  const std::size_t in = weights.dim(0);
  std::size_t batch = 1;
  if (x.rank() == 1) {
    if (x.dim(0) != in) {
      throw std::invalid_argument("dense: input " + to_string(x.shape()) + " vs weights " +
                                  to_string(weights.shape()));
    }
  } else if (x.rank() == 2) {
    if (x.dim(1) != in) {
      throw std::invalid_argument("dense: input " + to_string(x.shape()) + " vs weights " +
                                  to_string(weights.shape()));
    }
    batch = x.dim(0);
  } else {
    throw std::invalid_argument("dense: input rank must be 1 or 2");
  }
  return {batch, in, weights.dim(1)};
}

}  // namespace

Tensor dense(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  const auto d = dense_dims(x, weights);
  require_shape(bias, {d.out}, "dense bias");
  Tensor y(x.rank() == 1 ? Shape{d.out} : Shape{d.batch, d.out});
  auto Y = matrix_view(y, d.batch, d.out);
  Y.noalias() = matrix_view(x, d.batch, d.in) * matrix_view(weights, d.in, d.out);
  Y.rowwise() += vector_view(bias);
  return y;
}

DenseGrads dense_backward(const Tensor& x, const Tensor& weights, const Tensor& upstream) {
  const auto d = dense_dims(x, weights);
  if (upstream.size() != d.batch * d.out) {
    throw std::invalid_argument("dense_backward: upstream shape " + to_string(upstream.shape()));
  }
  DenseGrads g{Tensor(x.shape()), Tensor(weights.shape()), Tensor({d.out})};
  const auto dY = matrix_view(upstream, d.batch, d.out);
  matrix_view(g.input, d.batch, d.in).noalias() =
      dY * matrix_view(weights, d.in, d.out).transpose();
  matrix_view(g.weights, d.in, d.out).noalias() =
      matrix_view(x, d.batch, d.in).transpose() * dY;
  vector_view(g.bias) = dY.colwise().sum();
  return g;
}

Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng, Tensor* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout: rate must satisfy 0 <= rate < 1");
  }
  if (mode == Mode::infer || rate == 0.0) {
    if (mask) *mask = Tensor(x.shape(), 1.0);
    return x;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor m(x.shape());
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    y[i] = x[i] * m[i];
  }
  if (mask) *mask = std::move(m);
  return y;
}

Tensor apply_mask(const Tensor& upstream, const Tensor& mask) {
  require_shape(upstream, mask.shape(), "dropout mask");
  Tensor g(upstream.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = upstream[i] * mask[i];
  return g;
}

namespace {

struct ConvDims {
  std::size_t length;
  std::size_t depth;
  std::size_t filters;
  std::size_t width;
  std::size_t out_length;
};

ConvDims conv_dims(const Tensor& x, const Tensor& kernels) {
  if (x.rank() != 2) throw std::invalid_argument("conv1d: input must be (L x D)");
  if (kernels.rank() != 3) throw std::invalid_argument("conv1d: kernels must be (F x k x D)");
  ConvDims d{x.dim(0), x.dim(1), kernels.dim(0), kernels.dim(1), 0};
  if (kernels.dim(2) != d.depth) {
    throw std::invalid_argument("conv1d: kernel depth " + std::to_string(kernels.dim(2)) +
                                " does not match input depth " + std::to_string(d.depth));
  }
  if (d.length < d.width) {
    throw std::invalid_argument("conv1d: input length " + std::to_string(d.length) +
                                " is shorter than kernel size " + std::to_string(d.width));
  }
  d.out_length = d.length - d.width + 1;
  return d;
}

using StridedPatches =
    Eigen::Map<const detail::RowMatrix, Eigen::Unaligned, Eigen::OuterStride<>>;

// Row i of the patch matrix is x[i .. i+k-1] flattened, which is contiguous
// in row-major storage, so overlapping windows are a strided view.
StridedPatches patches(const Tensor& x, const ConvDims& d) {
  return StridedPatches(x.data(), static_cast<Eigen::Index>(d.out_length),
                        static_cast<Eigen::Index>(d.width * d.depth),
                        Eigen::OuterStride<>(static_cast<Eigen::Index>(d.depth)));
}

}  // namespace

Tensor conv1d(const Tensor& x, const Tensor& kernels, const Tensor& bias) {
  const auto d = conv_dims(x, kernels);
  require_shape(bias, {d.filters}, "conv1d bias");
  Tensor y({d.out_length, d.filters});
  auto Y = matrix_view(y, d.out_length, d.filters);
  Y.noalias() = patches(x, d) * matrix_view(kernels, d.filters, d.width * d.depth).transpose();
  Y.rowwise() += vector_view(bias);
  return y;
}

Conv1dGrads conv1d_backward(const Tensor& x, const Tensor& kernels, const Tensor& upstream) {
  const auto d = conv_dims(x, kernels);
  require_shape(upstream, {d.out_length, d.filters}, "conv1d_backward upstream");
  Conv1dGrads g{Tensor(x.shape()), Tensor(kernels.shape()), Tensor({d.filters})};
  const auto dY = matrix_view(upstream, d.out_length, d.filters);
  const auto K = matrix_view(kernels, d.filters, d.width * d.depth);
  matrix_view(g.kernels, d.filters, d.width * d.depth).noalias() = dY.transpose() * patches(x, d);
  vector_view(g.bias) = dY.colwise().sum();
  const detail::RowMatrix dP = dY * K;
  const auto span = static_cast<Eigen::Index>(d.width * d.depth);
  for (std::size_t i = 0; i < d.out_length; ++i) {
    detail::VectorView(g.input.data() + i * d.depth, span) += dP.row(static_cast<Eigen::Index>(i));
  }
  return g;
}

PoolResult maxpool1d(const Tensor& x, std::size_t size, std::size_t stride) {
  if (x.rank() != 2) throw std::invalid_argument("maxpool1d: input must be (L x F)");
  if (size == 0 || stride == 0) throw std::invalid_argument("maxpool1d: size and stride >= 1");
  const std::size_t length = x.dim(0);
  const std::size_t features = x.dim(1);
  if (length < size) {
    throw std::invalid_argument("maxpool1d: input length " + std::to_string(length) +
                                " is shorter than pool size " + std::to_string(size));
  }
  const std::size_t out_length = (length - size) / stride + 1;
  PoolResult r{Tensor({out_length, features}), std::vector<std::size_t>(out_length * features)};
  for (std::size_t o = 0; o < out_length; ++o) {
    const std::size_t start = o * stride;
    for (std::size_t f = 0; f < features; ++f) {
      std::size_t best = start * features + f;
      for (std::size_t j = 1; j < size; ++j) {
        const std::size_t idx = (start + j) * features + f;
        if (x[idx] > x[best]) best = idx;
      }
      r.output.at(o, f) = x[best];
      r.argmax[o * features + f] = best;
    }
  }
  return r;
}

Tensor maxpool1d_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                          const Tensor& upstream) {
  if (upstream.size() != argmax.size()) {
    throw std::invalid_argument("maxpool1d_backward: upstream does not match pooled output");
  }
  Tensor g(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) g[argmax[i]] += upstream[i];
  return g;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace railcause::nn
