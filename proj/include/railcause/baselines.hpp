#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "railcause/vectorize.hpp"

/// Classical tf-idf baselines: multinomial naive Bayes and one-vs-rest
/// linear SVM.
namespace railcause::baselines {

using vectorize::SparseVector;

struct Prediction {
  std::size_t label = 0;
  std::vector<double> scores;  // log-posteriors (NBC) or decision values (SVM)
};

/// Lowest index wins ties.
std::size_t argmax(std::span<const double> values);

struct NbcModel {
  std::vector<double> log_prior;                    // K
  std::vector<std::vector<double>> log_likelihood;  // K x V
  double alpha = 1.0;

  std::size_t num_classes() const { return log_prior.size(); }
  std::size_t dimension() const { return log_likelihood.empty() ? 0 : log_likelihood[0].size(); }
};

/// Multinomial NB over feature masses (tf-idf weights accepted as fractional
/// counts) with Laplace smoothing `alpha`:
///   log P(t | c) = ln((mass_ct + alpha) / (sum_t mass_ct + alpha V)).
/// Throws DataError when a class in [0, K) has no documents, or alpha <= 0.
NbcModel fit_nbc(std::span<const SparseVector> x, std::span<const std::size_t> y,
                 std::size_t num_classes, std::size_t dimension, double alpha = 1.0);

/// Scores are unnormalized log-posteriors.
Prediction predict(const NbcModel& model, const SparseVector& x);

/// Normalized posterior P(c | x).
std::vector<double> posterior(const NbcModel& model, const SparseVector& x);

struct LinearSvmModel {
  std::vector<std::vector<double>> weights;  // K x V
  std::vector<double> bias;                  // K
  double lambda = 1e-4;

  std::size_t num_classes() const { return bias.size(); }
  std::size_t dimension() const { return weights.empty() ? 0 : weights[0].size(); }
};

/// One-vs-rest hinge loss, stochastic subgradient descent with step size
/// 1 / (lambda t) over `epochs` shuffled passes. The bias is learned as the
/// weight of a constant feature 1. Throws DataError when fewer than two
/// classes appear in `y` or lambda <= 0.
LinearSvmModel fit_svm(std::span<const SparseVector> x, std::span<const std::size_t> y,
                       std::size_t num_classes, std::size_t dimension, double lambda = 1e-4,
                       std::size_t epochs = 10, std::uint64_t seed = 0);

/// Scores are decision values w_c . x + b_c.
Prediction predict(const LinearSvmModel& model, const SparseVector& x);

nlohmann::json to_json(const NbcModel& model);
nlohmann::json to_json(const LinearSvmModel& model);
NbcModel nbc_from_json(const nlohmann::json& j);
LinearSvmModel svm_from_json(const nlohmann::json& j);

}  // namespace railcause::baselines
