#include "railcause/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "railcause/errors.hpp"

namespace railcause::vectorize {

TfIdfModel::TfIdfModel(std::shared_ptr<const text::Vocabulary> vocab, std::vector<double> idf)
    : vocab_(std::move(vocab)), idf_(std::move(idf)) {
  if (!vocab_ || idf_.size() != vocab_->size()) {
    throw DataError("tf-idf: idf vector does not match vocabulary size");
  }
}

TfIdfModel fit_tfidf(std::span<const text::Tokens> train_docs,
                     std::shared_ptr<const text::Vocabulary> vocab) {
  if (train_docs.empty()) throw DataError("tf-idf: no training documents");
  std::vector<std::size_t> df(vocab->size(), 0);
  std::unordered_set<std::size_t> seen;
  for (const auto& doc : train_docs) {
    seen.clear();
    for (const auto& tok : doc) {
      if (auto idx = vocab->find(tok); idx && seen.insert(*idx).second) ++df[*idx];
    }
  }
  const double n = static_cast<double>(train_docs.size());
  std::vector<double> idf(vocab->size(), 0.0);
  for (std::size_t i = 2; i < vocab->size(); ++i) {
    if (df[i] == 0) {
      throw DataError("tf-idf: vocabulary token '" + vocab->token(i) +
                      "' does not occur in the training documents");
    }
    idf[i] = std::log(n / static_cast<double>(df[i]));
  }
  return TfIdfModel(std::move(vocab), std::move(idf));
}

SparseVector tfidf_transform(const TfIdfModel& model, const text::Tokens& doc) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& tok : doc) {
    if (auto idx = model.vocab().find(tok)) ++counts[*idx];
  }
  SparseVector out;
  out.reserve(counts.size());
  for (auto [index, count] : counts) {
    const double w = static_cast<double>(count) * model.idf()[index];
    if (w != 0.0) out.push_back({index, w});
  }
  return out;
}

SparseVector add(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].index < a[i].index) {
      out.push_back(b[j++]);
    } else {
      const double v = a[i].value + b[j].value;
      if (v != 0.0) out.push_back({a[i].index, v});
      ++i;
      ++j;
    }
  }
  return out;
}

std::vector<double> to_dense(const SparseVector& v, std::size_t dimension) {
  std::vector<double> out(dimension, 0.0);
  for (const auto& e : v) out.at(e.index) = e.value;
  return out;
}

}  // namespace railcause::vectorize
