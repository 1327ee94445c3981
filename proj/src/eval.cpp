#include "railcause/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "railcause/csv.hpp"

namespace railcause::eval {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes, std::vector<std::string> class_names)
    : k_(num_classes), names_(std::move(class_names)), counts_(num_classes * num_classes, 0) {
  if (names_.empty()) {
    for (std::size_t i = 0; i < k_; ++i) names_.push_back(std::to_string(i));
  } else if (names_.size() != k_) {
    throw std::invalid_argument("confusion matrix: class name count does not match K");
  }
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t col = 0;
  for (std::size_t t = 0; t < k_; ++t) col += (*this)(t, c);
  return col - true_positives(c);
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  return support(c) - true_positives(c);
}

std::uint64_t ConfusionMatrix::support(std::size_t c) const {
  std::uint64_t row = 0;
  for (std::size_t p = 0; p < k_; ++p) row += (*this)(c, p);
  return row;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::string ConfusionMatrix::to_csv() const {
  std::vector<std::string> header{"true\\predicted"};
  header.insert(header.end(), names_.begin(), names_.end());
  std::string out = csv::join(header) + "\n";
  for (std::size_t t = 0; t < k_; ++t) {
    std::vector<std::string> row{names_[t]};
    for (std::size_t p = 0; p < k_; ++p) row.push_back(std::to_string((*this)(t, p)));
    out += csv::join(row) + "\n";
  }
  return out;
}

ConfusionMatrix confusion(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                          std::size_t num_classes, std::vector<std::string> class_names) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("confusion: y_true and y_pred differ in length");
  }
  ConfusionMatrix cm(num_classes, std::move(class_names));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] >= num_classes || y_pred[i] >= num_classes) {
      throw std::invalid_argument("confusion: label outside [0, " + std::to_string(num_classes) +
                                  ") at position " + std::to_string(i));
    }
    cm.add(y_true[i], y_pred[i]);
  }
  return cm;
}

namespace {
double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
  MetricsReport report;
  const std::size_t k = cm.num_classes();
  std::uint64_t tp_sum = 0;
  std::uint64_t fp_sum = 0;
  std::uint64_t fn_sum = 0;
  double f_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto tp = cm.true_positives(c);
    const auto fp = cm.false_positives(c);
    const auto fn = cm.false_negatives(c);
    ClassMetrics m;
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    const double pr = m.precision + m.recall;
    m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
    m.support = cm.support(c);
    f_sum += m.f1;
    tp_sum += tp;
    fp_sum += fp;
    fn_sum += fn;
    report.per_class.push_back(m);
  }
  report.macro_f1 = k == 0 ? 0.0 : f_sum / static_cast<double>(k);
  const double micro_p = ratio(tp_sum, tp_sum + fp_sum);
  const double micro_r = ratio(tp_sum, tp_sum + fn_sum);
  report.micro_f1 = micro_p + micro_r == 0.0 ? 0.0 : 2.0 * micro_p * micro_r / (micro_p + micro_r);
  report.accuracy = ratio(tp_sum, cm.total());
  return report;
}

double macro_f1(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                std::size_t num_classes) {
  return metrics(confusion(y_true, y_pred, num_classes)).macro_f1;
}

RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& positives) {
  if (scores.size() != positives.size()) {
    throw std::invalid_argument("roc_curve: scores and labels differ in length");
  }
  const auto n_pos = static_cast<std::size_t>(std::count(positives.begin(), positives.end(), true));
  const std::size_t n_neg = positives.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc_curve: need at least one positive and one negative sample");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      if (positives[order[i]]) ++tp; else ++fp;
      ++i;
    }
    RocPoint p{threshold, static_cast<double>(fp) / static_cast<double>(n_neg),
               static_cast<double>(tp) / static_cast<double>(n_pos)};
    const RocPoint& last = curve.points.back();
    auc += (p.fpr - last.fpr) * (p.tpr + last.tpr) / 2.0;
    curve.points.push_back(p);
  }
  curve.auc = auc;
  return curve;
}

OvrRoc ovr_roc(const nn::Tensor& proba, std::span<const std::size_t> y_true) {
  if (proba.rank() != 2 || proba.dim(0) != y_true.size()) {
    throw std::invalid_argument("ovr_roc: proba must be (N x K) with N = len(y_true)");
  }
  const std::size_t n = proba.dim(0);
  const std::size_t k = proba.dim(1);
  OvrRoc out;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> scores(n);
    std::vector<bool> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = proba.at(i, c);
      pos[i] = y_true[i] == c;
    }
    const auto n_pos = static_cast<std::size_t>(std::count(pos.begin(), pos.end(), true));
    if (n_pos == 0 || n_pos == n) {
      out.curves.emplace_back(std::nullopt);
      out.warnings.push_back("class " + std::to_string(c) +
                             (n_pos == 0 ? " has no positive samples" : " has no negative samples") +
                             "; ROC curve omitted");
      continue;
    }
    out.curves.emplace_back(roc_curve(scores, pos));
  }
  return out;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold, p.fpr, p.tpr);
    out += buf;
  }
  return out;
}

}  // namespace railcause::eval
