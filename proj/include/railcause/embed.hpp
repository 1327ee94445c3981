#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "railcause/nn/tensor.hpp"
#include "railcause/text.hpp"

namespace railcause::embed {

enum class Provenance { trained_word2vec, loaded_glove };

/// V x D word vectors aligned with a vocabulary. PAD and UNK rows are zero.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::shared_ptr<const text::Vocabulary> vocab, nn::Tensor vectors,
                  Provenance provenance);

  const text::Vocabulary& vocab() const { return *vocab_; }
  std::shared_ptr<const text::Vocabulary> vocab_ptr() const { return vocab_; }
  const nn::Tensor& vectors() const { return vectors_; }
  std::size_t dim() const { return vectors_.dim(1); }
  Provenance provenance() const { return provenance_; }

  std::span<const double> row(std::size_t index) const { return vectors_.row(index); }

 private:
  std::shared_ptr<const text::Vocabulary> vocab_;
  nn::Tensor vectors_;
  Provenance provenance_;
};

enum class Word2VecMode { cbow, skip_gram };

struct Word2VecConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  Word2VecMode mode = Word2VecMode::cbow;
  std::size_t negative = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  std::size_t min_count = 5;
  /// Frequent-word downsampling threshold; 0 disables it.
  double subsample = 0.0;
};

struct Word2VecResult {
  EmbeddingMatrix embeddings;
  /// Mean negative-sampling loss per (center, context) training pair, one
  /// entry per epoch.
  std::vector<double> epoch_loss;
};

/// Negative-sampling word2vec over narrative token lists. The context
/// window is symmetric with a fixed radius and never crosses a narrative
/// boundary. The learning rate decays linearly over all epochs.
/// Single-threaded and deterministic for a fixed seed. Throws DataError when
/// no token reaches min_count.
Word2VecResult train_word2vec(std::span<const text::Tokens> corpus, const Word2VecConfig& config,
                              std::uint64_t seed);

/// Reads `word v1 ... vD` lines. Vocabulary tokens found in the file get
/// their vector; everything else (UNK and PAD included) stays zero. D comes
/// from the first line. Throws DataError with the line number on a
/// dimension mismatch or a non-numeric component.
EmbeddingMatrix load_glove(std::istream& in, std::shared_ptr<const text::Vocabulary> vocab);

/// Loads every line of a vector file, building the vocabulary from the
/// file's words in file order.
EmbeddingMatrix load_glove(std::istream& in);

/// Writes every real token (index >= 2) as `word v1 ... vD`, 6 significant
/// digits.
void save_glove(std::ostream& out, const EmbeddingMatrix& matrix);

struct Neighbor {
  std::string token;
  double similarity = 0.0;
};

double cosine(std::span<const double> a, std::span<const double> b);

/// Top-k tokens by cosine similarity to `query`, descending, ties broken by
/// index; the query itself, PAD and UNK are excluded. Zero-norm candidates
/// score 0. Throws DataError when the query is unknown or has a zero vector.
std::vector<Neighbor> cosine_knn(const EmbeddingMatrix& matrix, std::string_view query,
                                 std::size_t k);

/// (capacity x D) matrix whose row i is the vector of seq.indices[i].
nn::Tensor embed_sequence(const text::TokenSequence& seq, const EmbeddingMatrix& matrix);

/// Vocabulary tokens closest to `word` by edit distance (for OOV messages).
std::vector<std::string> closest_spellings(const text::Vocabulary& vocab, std::string_view word,
                                           std::size_t count);

}  // namespace railcause::embed
