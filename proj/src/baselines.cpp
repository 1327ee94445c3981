#include "railcause/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "railcause/errors.hpp"
#include "railcause/rng.hpp"

namespace railcause::baselines {
namespace {

void check_dimension(const SparseVector& x, std::size_t dimension) {
  for (const auto& e : x) {
    if (e.index >= dimension) {
      throw std::invalid_argument("feature index " + std::to_string(e.index) +
                                  " outside model dimension " + std::to_string(dimension));
    }
  }
}

void check_inputs(std::span<const SparseVector> x, std::span<const std::size_t> y,
                  std::size_t num_classes, std::size_t dimension) {
  if (x.size() != y.size()) throw DataError("baseline fit: X and y differ in length");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= num_classes) throw DataError("baseline fit: label outside [0, K)");
    check_dimension(x[i], dimension);
  }
}

}  // namespace

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

NbcModel fit_nbc(std::span<const SparseVector> x, std::span<const std::size_t> y,
                 std::size_t num_classes, std::size_t dimension, double alpha) {
  if (!(alpha > 0.0)) throw DataError("naive Bayes: alpha must be > 0");
  check_inputs(x, y, num_classes, dimension);
  std::vector<std::size_t> docs(num_classes, 0);
  std::vector<std::vector<double>> mass(num_classes, std::vector<double>(dimension, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++docs[y[i]];
    for (const auto& e : x[i]) mass[y[i]][e.index] += e.value;
  }
  NbcModel m;
  m.alpha = alpha;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (docs[c] == 0) {
      throw DataError("naive Bayes: class " + std::to_string(c) + " has no training documents");
    }
    m.log_prior.push_back(std::log(static_cast<double>(docs[c]) / static_cast<double>(x.size())));
    const double total = std::accumulate(mass[c].begin(), mass[c].end(), 0.0) +
                         alpha * static_cast<double>(dimension);
    std::vector<double> ll(dimension);
    for (std::size_t t = 0; t < dimension; ++t) ll[t] = std::log((mass[c][t] + alpha) / total);
    m.log_likelihood.push_back(std::move(ll));
  }
  return m;
}

Prediction predict(const NbcModel& model, const SparseVector& x) {
  check_dimension(x, model.dimension());
  Prediction p;
  p.scores = model.log_prior;
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    for (const auto& e : x) p.scores[c] += e.value * model.log_likelihood[c][e.index];
  }
  p.label = argmax(p.scores);
  return p;
}

std::vector<double> posterior(const NbcModel& model, const SparseVector& x) {
  auto scores = predict(model, x).scores;
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - m);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

LinearSvmModel fit_svm(std::span<const SparseVector> x, std::span<const std::size_t> y,
                       std::size_t num_classes, std::size_t dimension, double lambda,
                       std::size_t epochs, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw DataError("SVM: lambda must be > 0");
  check_inputs(x, y, num_classes, dimension);
  if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
    throw DataError("SVM: training labels contain a single class");
  }
  LinearSvmModel m;
  m.lambda = lambda;
  for (std::size_t c = 0; c < num_classes; ++c) {
    // w = scale * v; the last coordinate of v is the bias feature.
    std::vector<double> v(dimension + 1, 0.0);
    double scale = 1.0;
    std::size_t t = 0;
    Rng rng(mix_seed(seed, c));
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t i : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double label = y[i] == c ? 1.0 : -1.0;
        double margin = v[dimension];
        for (const auto& e : x[i]) margin += v[e.index] * e.value;
        margin *= scale * label;
        const double shrink = 1.0 - eta * lambda;
        if (shrink <= 0.0) {
          std::fill(v.begin(), v.end(), 0.0);
          scale = 1.0;
        } else {
          scale *= shrink;
        }
        if (margin < 1.0) {
          const double step = eta * label / scale;
          for (const auto& e : x[i]) v[e.index] += step * e.value;
          v[dimension] += step;
        }
        if (scale < 1e-9) {
          for (double& w : v) w *= scale;
          scale = 1.0;
        }
      }
    }
    std::vector<double> w(dimension);
    for (std::size_t j = 0; j < dimension; ++j) w[j] = v[j] * scale;
    m.weights.push_back(std::move(w));
    m.bias.push_back(v[dimension] * scale);
  }
  return m;
}

Prediction predict(const LinearSvmModel& model, const SparseVector& x) {
  check_dimension(x, model.dimension());
  Prediction p;
  p.scores = model.bias;
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    for (const auto& e : x) p.scores[c] += model.weights[c][e.index] * e.value;
  }
  p.label = argmax(p.scores);
  return p;
}

nlohmann::json to_json(const NbcModel& model) {
  return {{"type", "nbc"},
          {"alpha", model.alpha},
          {"log_prior", model.log_prior},
          {"log_likelihood", model.log_likelihood}};
}

nlohmann::json to_json(const LinearSvmModel& model) {
  return {{"type", "svm"}, {"lambda", model.lambda}, {"bias", model.bias}, {"weights", model.weights}};
}

NbcModel nbc_from_json(const nlohmann::json& j) {
  if (j.at("type") != "nbc") throw DataError("expected a naive Bayes model");
  NbcModel m;
  m.alpha = j.at("alpha").get<double>();
  m.log_prior = j.at("log_prior").get<std::vector<double>>();
  m.log_likelihood = j.at("log_likelihood").get<std::vector<std::vector<double>>>();
  return m;
}

LinearSvmModel svm_from_json(const nlohmann::json& j) {
  if (j.at("type") != "svm") throw DataError("expected an SVM model");
  LinearSvmModel m;
  m.lambda = j.at("lambda").get<double>();
  m.bias = j.at("bias").get<std::vector<double>>();
  m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  return m;
}

}  // namespace railcause::baselines
