#include <stdexcept>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "gradcases.hpp"
#include "railcause/nn/ops.hpp"
#include "railcause/nn/tensor.hpp"
#include "railcause/rng.hpp"

using namespace railcause;
using namespace railcause::nn;
using railcause::testing::random_tensor;

TEST_SUITE("nn") {
  TEST_CASE("tensor basics") {
    Tensor t = Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(t.rank() == 2);
    CHECK(t.at(1, 2) == 6);
    CHECK(t.row(1)[0] == 4);
    CHECK(t.reshaped({3, 2}).at(2, 1) == 6);
    CHECK_THROWS_AS(t.reshaped({4, 2}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
    t[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(t.all_finite());
    CHECK(to_string({2, 3}) == "[2, 3]");
  }

  TEST_CASE("relu") {
    CHECK(relu(Tensor::vector({-1, 0, 2})) == Tensor::vector({0, 0, 2}));
    CHECK(relu_backward(Tensor::vector({-1, 2}), Tensor::vector({1, 1})) == Tensor::vector({0, 1}));
    CHECK(relu_backward(Tensor::vector({0}), Tensor::vector({1})) == Tensor::vector({0}));
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      const auto x = random_tensor({7}, rng);
      REQUIRE(relu(relu(x)) == relu(x));
    }
  }

  TEST_CASE("softmax") {
    const auto a = softmax(Tensor::vector({0, 0}));
    CHECK(a[0] == doctest::Approx(0.5));
    const auto b = softmax(Tensor::vector({std::log(2.0), 0}));
    CHECK(b[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    const auto c = softmax(Tensor::vector({1000, 0}));
    CHECK(std::abs(c[0] - 1.0) < 1e-12);
    CHECK(c[1] < 1e-12);
    CHECK(c.all_finite());
  }

  TEST_CASE("softmax properties") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t k = 1 + rng.below(10);
      const auto z = random_tensor({k}, rng, -20, 20);
      const auto p = softmax(z);
      double sum = 0.0;
      for (double v : p.values()) {
        REQUIRE(v > 0.0);
        REQUIRE(v <= 1.0);
        sum += v;
      }
      REQUIRE(std::abs(sum - 1.0) < 1e-9);
      Tensor shifted = z;
      const double shift = rng.uniform(-50, 50);
      for (auto& v : shifted.values()) v += shift;
      const auto q = softmax(shifted);
      for (std::size_t i = 0; i < k; ++i) REQUIRE(std::abs(p[i] - q[i]) < 1e-9);
    }
    const auto m = softmax(Tensor::matrix(2, 2, {0, 0, std::log(2.0), 0}), 1);
    CHECK(m.at(1, 0) == doctest::Approx(2.0 / 3.0));
    const auto cols = softmax(Tensor::matrix(2, 2, {0, std::log(2.0), 0, 0}), 0);
    CHECK(cols.at(0, 1) == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("cross entropy") {
    CHECK(cross_entropy(Tensor::vector({1 - 1e-12, 1e-12}), 0) == doctest::Approx(0.0));
    CHECK(cross_entropy(Tensor::vector({0.5, 0.5}), 1) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(cross_entropy(Tensor::vector({0.5, 0.5}), 2), std::out_of_range);
    const auto g = softmax_cross_entropy_backward(softmax(Tensor::vector({0, 0})), 0);
    CHECK(g[0] == doctest::Approx(-0.5));
    CHECK(g[1] == doctest::Approx(0.5));
  }

  TEST_CASE("dense") {
    const auto eye = Tensor::matrix(2, 2, {1, 0, 0, 1});
    const auto x = Tensor::vector({1, 2});
    CHECK(dense(x, eye, Tensor::vector({0, 0})) == x);
    CHECK(dense(x, eye, Tensor::vector({3, 3})) == Tensor::vector({4, 5}));
    CHECK_THROWS_AS(dense(Tensor::vector({1, 2, 3}), eye, Tensor::vector({0, 0})),
                    std::invalid_argument);
    const auto batch = dense(Tensor::matrix(2, 2, {1, 2, 3, 4}), eye, Tensor::vector({1, 1}));
    CHECK(batch == Tensor::matrix(2, 2, {2, 3, 4, 5}));
  }

  TEST_CASE("dropout") {
    Rng rng(3);
    const auto x = random_tensor({4, 5}, rng);
    CHECK(dropout(x, 0.0, Mode::train, rng) == x);
    CHECK(dropout(x, 0.7, Mode::infer, rng) == x);
    CHECK_THROWS_AS(dropout(x, 1.0, Mode::train, rng), std::invalid_argument);
    CHECK_THROWS_AS(dropout(x, -0.1, Mode::train, rng), std::invalid_argument);

    Tensor ones({100000}, 1.0);
    Tensor mask;
    const auto y = dropout(ones, 0.5, Mode::train, rng, &mask);
    double mean = 0.0;
    for (double v : y.values()) {
      REQUIRE((v == 0.0 || v == 2.0));
      mean += v;
    }
    mean /= static_cast<double>(y.size());
    CHECK(std::abs(mean - 1.0) < 0.02);
    CHECK(apply_mask(ones, mask) == y);
  }

  TEST_CASE("conv1d") {
    const auto y = conv1d(Tensor({5, 1}, 1.0), Tensor({1, 5, 1}, 1.0), Tensor({1}));
    CHECK(y.shape() == Shape{1, 1});
    CHECK(y[0] == 5.0);
    Rng rng(4);
    const auto big = conv1d(Tensor({500, 2}), random_tensor({3, 5, 2}, rng), Tensor({3}));
    CHECK(big.shape() == Shape{496, 3});
    CHECK_THROWS_AS(conv1d(Tensor({4, 1}), Tensor({1, 5, 1}), Tensor({1})), std::invalid_argument);
  }

  TEST_CASE("conv1d matches the defining sum") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t k = 1 + rng.below(4), l = k + rng.below(6), d = 1 + rng.below(3),
                        f = 1 + rng.below(3);
      const auto x = random_tensor({l, d}, rng), w = random_tensor({f, k, d}, rng),
                 b = random_tensor({f}, rng);
      const auto y = conv1d(x, w, b);
      for (std::size_t i = 0; i + k <= l; ++i) {
        for (std::size_t o = 0; o < f; ++o) {
          double s = b[o];
          for (std::size_t j = 0; j < k; ++j)
            for (std::size_t c = 0; c < d; ++c) s += x.at(i + j, c) * w[(o * k + j) * d + c];
          REQUIRE(std::abs(y.at(i, o) - s) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("conv1d is linear in its input") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t k = 1 + rng.below(4), l = k + rng.below(8), d = 1 + rng.below(4),
                        f = 1 + rng.below(4);
      const auto x1 = random_tensor({l, d}, rng), x2 = random_tensor({l, d}, rng);
      const auto w = random_tensor({f, k, d}, rng);
      const Tensor zero({f});
      const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
      Tensor mix = x1;
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x1[i] + b * x2[i];
      const auto lhs = conv1d(mix, w, zero);
      const auto y1 = conv1d(x1, w, zero), y2 = conv1d(x2, w, zero);
      for (std::size_t i = 0; i < lhs.size(); ++i) REQUIRE(std::abs(lhs[i] - (a * y1[i] + b * y2[i])) < 1e-9);
    }
  }

  TEST_CASE("maxpool1d") {
    const auto a = maxpool1d(Tensor({5, 1}, std::vector<double>{1, 3, 2, 5, 4}));
    CHECK(a.output == Tensor({1, 1}, std::vector<double>{5}));
    const auto b = maxpool1d(Tensor({10, 1}, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 5, 5);
    CHECK(b.output == Tensor({2, 1}, std::vector<double>{5, 10}));
    CHECK_THROWS_AS(maxpool1d(Tensor({4, 1})), std::invalid_argument);

    const Tensor flat({10, 2}, 3.0);
    const auto c = maxpool1d(flat);
    for (double v : c.output.values()) CHECK(v == 3.0);
    const auto g = maxpool1d_backward(flat.shape(), c.argmax, Tensor({2, 2}, 1.0));
    for (std::size_t r = 0; r < 10; ++r) {
      for (std::size_t f = 0; f < 2; ++f) CHECK(g.at(r, f) == (r % 5 == 0 ? 1.0 : 0.0));
    }
    CHECK(maxpool1d(Tensor({99, 1})).output.dim(0) == 19);
  }

  TEST_CASE("gradients match finite differences") {
    for (const auto& c : testing::grad_cases()) {
      CAPTURE(c.name);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CAPTURE(seed);
        REQUIRE(c.run(seed) < 1e-4);
      }
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) REQUIRE(testing::grad_relu(seed) < 1e-4);
  }
}
