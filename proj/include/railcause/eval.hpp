#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "railcause/nn/tensor.hpp"

/// Classification metrics: confusion matrix, per-class precision / recall /
/// F1, macro and micro averages, and one-vs-rest ROC curves.
namespace railcause::eval {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes, std::vector<std::string> class_names = {});

  std::size_t num_classes() const { return k_; }
  const std::vector<std::string>& class_names() const { return names_; }

  std::uint64_t operator()(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * k_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted) { ++counts_[truth * k_ + predicted]; }

  std::uint64_t true_positives(std::size_t c) const { return (*this)(c, c); }
  std::uint64_t false_positives(std::size_t c) const;
  std::uint64_t false_negatives(std::size_t c) const;
  std::uint64_t support(std::size_t c) const;
  std::uint64_t total() const;

  /// Header row and first column hold class names.
  std::string to_csv() const;

 private:
  std::size_t k_;
  std::vector<std::string> names_;
  std::vector<std::uint64_t> counts_;
};

/// Throws std::invalid_argument on length mismatch or a label outside [0, K).
ConfusionMatrix confusion(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                          std::size_t num_classes, std::vector<std::string> class_names = {});

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double accuracy = 0.0;
};

/// Precision TP/(TP+FP), recall TP/(TP+FN), F = 2PR/(P+R), each taken as 0
/// when its denominator is 0. Macro-F1 averages F over all K classes.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Convenience: macro-F1 of a label vector pair.
double macro_f1(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                std::size_t num_classes);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;
};

/// Threshold sweep over the distinct scores in descending order; samples
/// with equal scores enter together. AUC by the trapezoidal rule. The first
/// point carries threshold +inf. Throws std::invalid_argument unless both
/// classes are present.
RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& positives);

struct OvrRoc {
  /// One entry per class; empty when the class has no positives (or no
  /// negatives) in y_true.
  std::vector<std::optional<RocCurve>> curves;
  std::vector<std::string> warnings;
};

/// `proba` is (N x K); column k scores class k against the rest.
OvrRoc ovr_roc(const nn::Tensor& proba, std::span<const std::size_t> y_true);

/// (threshold, fpr, tpr) rows with a header line.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace railcause::eval
