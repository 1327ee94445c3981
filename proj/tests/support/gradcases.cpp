#include "gradcases.hpp"

#include <cmath>

#include "railcause/nn/gradcheck.hpp"
#include "railcause/nn/gru.hpp"
#include "railcause/nn/ops.hpp"

namespace railcause::testing {

using nn::Tensor;

Tensor random_tensor(const nn::Shape& shape, Rng& rng, double lo, double hi) {
  Tensor t(shape);
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

double weighted_sum(const Tensor& out, const Tensor& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * w[i];
  return s;
}

}  // namespace

double grad_dense(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t b = pick(rng, 1, 4), in = pick(rng, 1, 6), out = pick(rng, 1, 6);
  const Tensor x = random_tensor({b, in}, rng), w = random_tensor({in, out}, rng),
               bias = random_tensor({out}, rng), up = random_tensor({b, out}, rng);
  const auto g = nn::dense_backward(x, w, up);
  return nn::grad_check(
      [&](const std::vector<Tensor>& p) { return weighted_sum(nn::dense(p[0], p[1], p[2]), up); },
      {x, w, bias}, {g.input, g.weights, g.bias});
}

double grad_conv1d(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = pick(rng, 1, 5), l = k + pick(rng, 0, 6), d = pick(rng, 1, 4),
                    f = pick(rng, 1, 4);
  const Tensor x = random_tensor({l, d}, rng), kern = random_tensor({f, k, d}, rng),
               bias = random_tensor({f}, rng), up = random_tensor({l - k + 1, f}, rng);
  const auto g = nn::conv1d_backward(x, kern, up);
  return nn::grad_check(
      [&](const std::vector<Tensor>& p) { return weighted_sum(nn::conv1d(p[0], p[1], p[2]), up); },
      {x, kern, bias}, {g.input, g.kernels, g.bias});
}

double grad_maxpool1d(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t size = pick(rng, 1, 5), stride = pick(rng, 1, 5),
                    l = size + pick(rng, 0, 12), f = pick(rng, 1, 4);
  const Tensor x = random_tensor({l, f}, rng);
  const auto fwd = nn::maxpool1d(x, size, stride);
  const Tensor up = random_tensor(fwd.output.shape(), rng);
  const Tensor gx = nn::maxpool1d_backward(x.shape(), fwd.argmax, up);
  return nn::grad_check(
      [&](const std::vector<Tensor>& p) {
        return weighted_sum(nn::maxpool1d(p[0], size, stride).output, up);
      },
      {x}, {gx});
}

double grad_dropout(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t r = pick(rng, 1, 5), c = pick(rng, 1, 8);
  const double rate = rng.uniform(0.1, 0.5);
  const Tensor x = random_tensor({r, c}, rng), up = random_tensor({r, c}, rng);
  Tensor mask;
  Rng drop(mix_seed(seed, 1));
  nn::dropout(x, rate, nn::Mode::train, drop, &mask);
  const Tensor gx = nn::apply_mask(up, mask);
  return nn::grad_check(
      [&](const std::vector<Tensor>& p) { return weighted_sum(nn::apply_mask(p[0], mask), up); },
      {x}, {gx});
}

double grad_softmax_ce(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = pick(rng, 2, 8), target = rng.below(k);
  const Tensor z = random_tensor({k}, rng, -3.0, 3.0);
  const Tensor g = nn::softmax_cross_entropy_backward(nn::softmax(z), target);
  return nn::grad_check(
      [&](const std::vector<Tensor>& p) { return nn::cross_entropy(nn::softmax(p[0]), target); },
      {z}, {g});
}

double grad_relu(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = pick(rng, 1, 12);
  Tensor x = random_tensor({n}, rng);
  for (auto& v : x.values()) {
    if (std::abs(v) < 1e-3) v = 0.5;
  }
  const Tensor up = random_tensor({n}, rng);
  const Tensor gx = nn::relu_backward(x, up);
  return nn::grad_check(
      [&](const std::vector<Tensor>& p) { return weighted_sum(nn::relu(p[0]), up); }, {x}, {gx});
}

namespace {

nn::GruParams random_gru(std::size_t in, std::size_t hidden, Rng& rng) {
  nn::GruParams p(in, hidden);
  p.for_each([&](const char*, Tensor& t) { t = random_tensor(t.shape(), rng); });
  return p;
}

std::vector<Tensor> flatten(nn::GruParams& p) {
  std::vector<Tensor> out;
  p.for_each([&](const char*, Tensor& t) { out.push_back(t); });
  return out;
}

nn::GruParams unflatten(const std::vector<Tensor>& v, std::size_t offset) {
  nn::GruParams p;
  std::size_t i = offset;
  p.for_each([&](const char*, Tensor& t) { t = v[i++]; });
  return p;
}

// Inputs are {x, h0, nine parameters}. steps == 0 exercises gru_cell on a
// single (D_in) vector instead of gru_layer.
double gru_check(std::size_t steps, std::uint64_t seed, std::size_t in, std::size_t hidden) {
  Rng rng(seed);
  auto p = random_gru(in, hidden, rng);
  const bool cell = steps == 0;
  const Tensor x = cell ? random_tensor({in}, rng) : random_tensor({steps, in}, rng);
  const Tensor h0 = random_tensor({hidden}, rng);
  const Tensor up = cell ? random_tensor({hidden}, rng) : random_tensor({steps, hidden}, rng);
  nn::GruCache cache;
  if (cell) nn::gru_cell(x, h0, p, &cache);
  else nn::gru_layer(x, p, &h0, &cache);
  nn::GruParams grads(in, hidden);
  const auto gi = nn::gru_backward(cache, p, up, grads);

  std::vector<Tensor> inputs{x, h0};
  for (auto& t : flatten(p)) inputs.push_back(t);
  std::vector<Tensor> analytic{gi.input, gi.initial};
  for (auto& t : flatten(grads)) analytic.push_back(t);
  return nn::grad_check(
      [&](const std::vector<Tensor>& v) {
        const auto q = unflatten(v, 2);
        const Tensor h = cell ? nn::gru_cell(v[0], v[1], q) : nn::gru_layer(v[0], q, &v[1]);
        return weighted_sum(h, up);
      },
      inputs, analytic);
}

}  // namespace

double grad_gru_cell(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t in = pick(rng, 1, 4), hidden = pick(rng, 1, 4);
  return gru_check(0, mix_seed(seed, 7), in, hidden);
}

double grad_gru_layer4(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t in = pick(rng, 1, 4), hidden = pick(rng, 1, 4);
  return gru_check(4, mix_seed(seed, 9), in, hidden);
}

const std::vector<GradCase>& grad_cases() {
  static const std::vector<GradCase> cases{
      {"dense", grad_dense},
      {"conv1d", grad_conv1d},
      {"maxpool1d", grad_maxpool1d},
      {"dropout", grad_dropout},
      {"softmax+cross_entropy", grad_softmax_ce},
      {"gru_cell", grad_gru_cell},
      {"gru_layer(4 steps)", grad_gru_layer4},
  };
  return cases;
}

}  // namespace railcause::testing
