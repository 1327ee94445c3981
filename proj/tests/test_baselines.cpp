#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "railcause/baselines.hpp"
#include "railcause/errors.hpp"
#include "railcause/rng.hpp"

using namespace railcause;
using namespace railcause::baselines;

namespace {

SparseVector sv(std::initializer_list<std::pair<std::size_t, double>> entries) {
  SparseVector v;
  for (const auto& [i, x] : entries) v.push_back({i, x});
  return v;
}

std::vector<SparseVector> toy_points(Rng& rng, std::vector<std::size_t>& labels, double scale = 1.0) {
  std::vector<SparseVector> x;
  labels.clear();
  for (int i = 0; i < 40; ++i) {
    const std::size_t c = i % 2;
    const double cx = c ? 2.0 : -2.0;
    x.push_back(sv({{0, scale * (cx + rng.uniform(-1, 1))}, {1, scale * (cx + rng.uniform(-1, 1))}}));
    labels.push_back(c);
  }
  return x;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("NBC separates class-exclusive tokens") {
    const std::vector<SparseVector> x{sv({{0, 1.0}}), sv({{1, 1.0}})};
    const std::vector<std::size_t> y{0, 1};
    const auto m = fit_nbc(x, y, 2, 2);
    CHECK(predict(m, x[0]).label == 0);
    CHECK(predict(m, x[1]).label == 1);
  }

  TEST_CASE("NBC hand-computed smoothed log-likelihoods") {
    const std::vector<SparseVector> x{sv({{0, 2.0}, {1, 1.0}}), sv({{0, 1.0}}), sv({{2, 3.0}})};
    const std::vector<std::size_t> y{0, 0, 1};
    const auto m = fit_nbc(x, y, 2, 3, 1.0);
    CHECK(m.log_prior[0] == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
    CHECK(m.log_prior[1] == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[0][0] == doctest::Approx(std::log(4.0 / 7.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[0][1] == doctest::Approx(std::log(2.0 / 7.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[0][2] == doctest::Approx(std::log(1.0 / 7.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[1][0] == doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[1][2] == doctest::Approx(std::log(4.0 / 6.0)).epsilon(1e-12));
    for (const auto& row : m.log_likelihood) {
      double s = 0.0;
      for (double v : row) s += std::exp(v);
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
  }

  TEST_CASE("uninformative features leave the priors") {
    const auto doc = sv({{0, 1.5}, {1, 1.5}});
    const std::vector<SparseVector> x{doc, doc, doc};
    const std::vector<std::size_t> y{0, 0, 1};
    const auto post = posterior(fit_nbc(x, y, 2, 2), doc);
    CHECK(post[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(post[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  TEST_CASE("NBC errors and ties") {
    const std::vector<SparseVector> x{sv({{0, 1.0}})};
    const std::vector<std::size_t> y{0};
    CHECK_THROWS_AS(fit_nbc(x, y, 2, 1), DataError);
    CHECK_THROWS_AS(fit_nbc(x, y, 1, 1, 0.0), DataError);

    const std::vector<SparseVector> sym{sv({{0, 1.0}}), sv({{1, 1.0}})};
    const std::vector<std::size_t> ys{0, 1};
    const auto m = fit_nbc(sym, ys, 2, 2);
    CHECK(predict(m, sv({{0, 1.0}, {1, 1.0}})).label == 0);
    CHECK_THROWS_AS(predict(m, sv({{5, 1.0}})), std::invalid_argument);
  }

  TEST_CASE("NBC posterior matches a brute-force computation") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t k = 2 + rng.below(3), v = 5;
      std::vector<SparseVector> x;
      std::vector<std::size_t> y;
      for (std::size_t i = 0; i < 4 * k; ++i) {
        SparseVector d;
        for (std::size_t t = 0; t < v; ++t)
          if (rng.uniform() < 0.5) d.push_back({t, rng.uniform(0.1, 3.0)});
        x.push_back(d);
        y.push_back(i % k);
      }
      const double alpha = rng.uniform(0.1, 2.0);
      const auto m = fit_nbc(x, y, k, v, alpha);
      std::vector<std::vector<double>> mass(k, std::vector<double>(v, 0.0));
      std::vector<double> count(k, 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        count[y[i]] += 1;
        for (const auto& e : x[i]) mass[y[i]][e.index] += e.value;
      }
      SparseVector q;
      for (std::size_t t = 0; t < v; ++t) q.push_back({t, rng.uniform(0.0, 2.0)});
      std::vector<double> logp(k);
      for (std::size_t c = 0; c < k; ++c) {
        double total = 0.0;
        for (double m_ct : mass[c]) total += m_ct;
        logp[c] = std::log(count[c] / static_cast<double>(x.size()));
        for (const auto& e : q) logp[c] += e.value * std::log((mass[c][e.index] + alpha) / (total + alpha * v));
      }
      double mx = logp[0];
      for (double l : logp) mx = std::max(mx, l);
      double z = 0.0;
      for (double l : logp) z += std::exp(l - mx);
      const auto post = posterior(m, q);
      for (std::size_t c = 0; c < k; ++c) REQUIRE(std::abs(post[c] - std::exp(logp[c] - mx) / z) < 1e-12);
      REQUIRE(predict(m, q).label == argmax(logp));
    }
  }

  TEST_CASE("NBC argmax is invariant to scaling the input under equal priors") {
    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<SparseVector> x;
      std::vector<std::size_t> y;
      for (std::size_t i = 0; i < 9; ++i) {
        SparseVector d;
        for (std::size_t t = 0; t < 6; ++t)
          if (rng.uniform() < 0.6) d.push_back({t, rng.uniform(0.1, 3.0)});
        x.push_back(d);
        y.push_back(i % 3);
      }
      const auto m = fit_nbc(x, y, 3, 6);
      SparseVector q;
      for (std::size_t t = 0; t < 6; ++t) q.push_back({t, rng.uniform(0.1, 2.0)});
      SparseVector scaled = q;
      const double s = rng.uniform(0.01, 100.0);
      for (auto& e : scaled) e.value *= s;
      REQUIRE(predict(m, q).label == predict(m, scaled).label);
    }
  }

  TEST_CASE("SVM on a separable 2D toy set") {
    Rng rng(5);
    std::vector<std::size_t> y;
    const auto x = toy_points(rng, y);
    const auto m = fit_svm(x, y, 2, 2, 1e-2, 200, 1);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto p = predict(m, x[i]);
      CHECK(p.label == y[i]);
      for (std::size_t c = 0; c < 2; ++c) {
        const double sign = c == y[i] ? 1.0 : -1.0;
        if (sign * p.scores[c] < 1.0 - 1e-6) ++violations;
      }
    }
    CHECK(violations == 0);
  }

  TEST_CASE("SVM refit on doubled inputs keeps training accuracy") {
    Rng a(6), b(6);
    std::vector<std::size_t> y1, y2;
    const auto x1 = toy_points(a, y1);
    const auto x2 = toy_points(b, y2, 2.0);
    const auto m1 = fit_svm(x1, y1, 2, 2, 1e-2, 50, 3);
    const auto m2 = fit_svm(x2, y2, 2, 2, 1e-2, 50, 3);
    CHECK(m1.weights != m2.weights);
    std::size_t c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
      c1 += predict(m1, x1[i]).label == y1[i];
      c2 += predict(m2, x2[i]).label == y2[i];
    }
    CHECK(c1 == x1.size());
    CHECK(c2 == c1);
  }

  TEST_CASE("SVM errors, scores and padding invariance") {
    const std::vector<SparseVector> x{sv({{0, 1.0}}), sv({{0, 2.0}})};
    const std::vector<std::size_t> same{1, 1};
    CHECK_THROWS_AS(fit_svm(x, same, 2, 1), DataError);
    const std::vector<std::size_t> y{0, 1};
    CHECK_THROWS_AS(fit_svm(x, y, 2, 1, 0.0), DataError);

    LinearSvmModel m;
    m.weights = {{-1.0}, {3.0}};
    m.bias = {0.0, 0.0};
    const auto p = predict(m, sv({{0, 1.0}}));
    CHECK(p.scores == std::vector<double>{-1.0, 3.0});
    CHECK(p.label == 1);

    Rng rng(7);
    std::vector<std::size_t> labels;
    const auto pts = toy_points(rng, labels);
    const auto fit = fit_svm(pts, labels, 2, 2, 1e-3, 5, 0);
    auto padded = fit;
    for (auto& w : padded.weights) w.push_back(0.0);
    for (const auto& q : pts) {
      auto q2 = q;
      q2.push_back({2, 5.0});
      REQUIRE(predict(fit, q).label == predict(padded, q2).label);
    }
  }

  TEST_CASE("SVM is deterministic per seed") {
    Rng rng(8);
    std::vector<std::size_t> y;
    const auto x = toy_points(rng, y);
    CHECK(fit_svm(x, y, 2, 2, 1e-3, 3, 9).weights == fit_svm(x, y, 2, 2, 1e-3, 3, 9).weights);
  }

  TEST_CASE("JSON round trips") {
    const std::vector<SparseVector> x{sv({{0, 1.0}}), sv({{1, 1.0}})};
    const std::vector<std::size_t> y{0, 1};
    const auto nbc = fit_nbc(x, y, 2, 2);
    const auto nb = nbc_from_json(to_json(nbc));
    CHECK(nb.log_prior == nbc.log_prior);
    CHECK(nb.log_likelihood == nbc.log_likelihood);
    const auto svm = fit_svm(x, y, 2, 2);
    const auto s = svm_from_json(to_json(svm));
    CHECK(s.weights == svm.weights);
    CHECK(s.bias == svm.bias);
  }
}
