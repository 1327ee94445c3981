#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace railcause::text {

using Tokens = std::vector<std::string>;

inline constexpr std::size_t kPad = 0;
inline constexpr std::size_t kUnk = 1;
inline constexpr std::size_t kDefaultCapacity = 500;

/// Lowercases, splits on whitespace, strips leading and trailing punctuation
/// from each token and drops tokens that end up empty.
Tokens tokenize(std::string_view text);

struct TransparentHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

/// Token/index maps with document frequencies. Indices 0 and 1 are reserved
/// for PAD and UNK and carry no document frequency.
class Vocabulary {
 public:
  Vocabulary();

  /// Builds from tokens listed in index order (starting at index 2).
  static Vocabulary from_tokens(std::vector<std::string> tokens,
                                std::vector<std::size_t> doc_freq, std::size_t n_docs);

  /// Total number of indices, PAD and UNK included.
  std::size_t size() const { return index_to_token_.size(); }

  /// Number of real tokens (indices >= 2).
  std::size_t token_count() const { return size() - 2; }

  std::optional<std::size_t> find(std::string_view token) const;

  /// Index of `token`, or UNK when absent.
  std::size_t index_of(std::string_view token) const;

  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }

  std::size_t doc_freq(std::size_t index) const { return doc_freq_.at(index); }
  std::size_t n_docs() const { return n_docs_; }

  /// Text format: first line is n_docs, then `token<TAB>doc_freq` for each
  /// token in index order starting at index 2.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

  bool operator==(const Vocabulary& other) const;

 private:
  std::unordered_map<std::string, std::size_t, TransparentHash, std::equal_to<>> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::vector<std::size_t> doc_freq_;
  std::size_t n_docs_ = 0;
};

/// Keeps tokens whose total occurrence count is at least `min_count`.
/// Indices are assigned by descending occurrence count, ties broken
/// lexicographically.
Vocabulary build_vocab(std::span<const Tokens> docs, std::size_t min_count = 1);

/// Fixed-capacity index sequence; positions at or past `true_length` hold PAD.
struct TokenSequence {
  std::vector<std::size_t> indices;
  std::size_t true_length = 0;

  std::size_t capacity() const { return indices.size(); }
  bool operator==(const TokenSequence&) const = default;
};

/// Unknown tokens map to UNK; long inputs keep their first `capacity` tokens.
TokenSequence encode(const Tokens& tokens, const Vocabulary& vocab,
                     std::size_t capacity = kDefaultCapacity);

/// Tokens for positions below true_length (UNK decodes as "<unk>").
Tokens decode(const TokenSequence& seq, const Vocabulary& vocab);

}  // namespace railcause::text
