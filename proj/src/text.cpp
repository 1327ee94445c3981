#include "railcause/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "railcause/errors.hpp"

namespace railcause::text {
namespace {

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t parse_count(std::string_view s, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("vocabulary line " + std::to_string(line_no) + ": bad count '" +
                    std::string(s) + "'");
  }
  return value;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::size_t b = i;
    std::size_t e = end;
    while (b < e && is_punct(text[b])) ++b;
    while (e > b && is_punct(text[e - 1])) --e;
    if (b < e) {
      std::string tok(text.substr(b, e - b));
      std::transform(tok.begin(), tok.end(), tok.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      tokens.push_back(std::move(tok));
    }
    i = end;
  }
  return tokens;
}

Vocabulary::Vocabulary() : index_to_token_{"<pad>", "<unk>"}, doc_freq_{0, 0} {}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens,
                                   std::vector<std::size_t> doc_freq, std::size_t n_docs) {
  if (tokens.size() != doc_freq.size()) {
    throw DataError("vocabulary: token and doc_freq lists differ in length");
  }
  Vocabulary v;
  v.n_docs_ = n_docs;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw DataError("vocabulary: empty token");
    if (doc_freq[i] > n_docs) {
      throw DataError("vocabulary: doc_freq of '" + tokens[i] + "' exceeds n_docs");
    }
    const std::size_t index = v.index_to_token_.size();
    if (!v.token_to_index_.emplace(tokens[i], index).second) {
      throw DataError("vocabulary: duplicate token '" + tokens[i] + "'");
    }
    v.index_to_token_.push_back(std::move(tokens[i]));
    v.doc_freq_.push_back(doc_freq[i]);
  }
  return v;
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = token_to_index_.find(token);
  if (it == token_to_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index_of(std::string_view token) const {
  return find(token).value_or(kUnk);
}

void Vocabulary::save(std::ostream& out) const {
  out << n_docs_ << '\n';
  for (std::size_t i = 2; i < size(); ++i) {
    out << index_to_token_[i] << '\t' << doc_freq_[i] << '\n';
  }
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("vocabulary: missing header line");
  const std::size_t n_docs = parse_count(line, 1);
  std::vector<std::string> tokens;
  std::vector<std::size_t> freqs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": missing tab");
    }
    tokens.push_back(line.substr(0, tab));
    freqs.push_back(parse_count(std::string_view(line).substr(tab + 1), line_no));
  }
  return from_tokens(std::move(tokens), std::move(freqs), n_docs);
}

bool Vocabulary::operator==(const Vocabulary& other) const {
  return index_to_token_ == other.index_to_token_ && doc_freq_ == other.doc_freq_ &&
         n_docs_ == other.n_docs_;
}

Vocabulary build_vocab(std::span<const Tokens> docs, std::size_t min_count) {
  if (min_count < 1) min_count = 1;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> stats;  // count, df
  std::set<std::string_view> seen;
  for (const auto& doc : docs) {
    seen.clear();
    for (const auto& tok : doc) {
      auto& s = stats[tok];
      ++s.first;
      if (seen.insert(tok).second) ++s.second;
    }
  }
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> kept;
  for (auto& [tok, s] : stats) {
    if (s.first >= min_count) kept.emplace_back(tok, s);
  }
  // stats is already lexicographic, so a stable sort by count keeps ties ordered
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second.first > b.second.first; });
  std::vector<std::string> tokens;
  std::vector<std::size_t> freqs;
  for (auto& [tok, s] : kept) {
    tokens.push_back(tok);
    freqs.push_back(s.second);
  }
  return Vocabulary::from_tokens(std::move(tokens), std::move(freqs), docs.size());
}

TokenSequence encode(const Tokens& tokens, const Vocabulary& vocab, std::size_t capacity) {
  TokenSequence seq;
  seq.indices.assign(capacity, kPad);
  seq.true_length = std::min(tokens.size(), capacity);
  for (std::size_t i = 0; i < seq.true_length; ++i) seq.indices[i] = vocab.index_of(tokens[i]);
  return seq;
}

Tokens decode(const TokenSequence& seq, const Vocabulary& vocab) {
  Tokens out;
  for (std::size_t i = 0; i < seq.true_length; ++i) out.push_back(vocab.token(seq.indices[i]));
  return out;
}

}  // namespace railcause::text
