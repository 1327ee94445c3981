#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "railcause/text.hpp"

namespace railcause::vectorize {

struct SparseEntry {
  std::size_t index = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Nonzero entries only, ascending by index.
using SparseVector = std::vector<SparseEntry>;

/// Term weighting W(d,t) = count(t in d) * ln(N / df(t)); no smoothing, no
/// normalization.
class TfIdfModel {
 public:
  TfIdfModel(std::shared_ptr<const text::Vocabulary> vocab, std::vector<double> idf);

  const text::Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const text::Vocabulary> vocab_ptr() const { return vocab_; }

  /// Indexed like the vocabulary; PAD and UNK carry 0.
  const std::vector<double>& idf() const { return idf_; }
  std::size_t dimension() const { return idf_.size(); }

 private:
  std::shared_ptr<const text::Vocabulary> vocab_;
  std::vector<double> idf_;
};

/// Document frequencies come from `train_docs` alone. Throws DataError when
/// a vocabulary token never occurs in them.
TfIdfModel fit_tfidf(std::span<const text::Tokens> train_docs,
                     std::shared_ptr<const text::Vocabulary> vocab);

/// Out-of-vocabulary tokens are ignored.
SparseVector tfidf_transform(const TfIdfModel& model, const text::Tokens& doc);

/// Elementwise sum of two sparse vectors.
SparseVector add(const SparseVector& a, const SparseVector& b);

std::vector<double> to_dense(const SparseVector& v, std::size_t dimension);

}  // namespace railcause::vectorize
