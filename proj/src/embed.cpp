#include "railcause/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "railcause/errors.hpp"
#include "railcause/nn/ops.hpp"
#include "railcause/rng.hpp"

namespace railcause::embed {

EmbeddingMatrix::EmbeddingMatrix(std::shared_ptr<const text::Vocabulary> vocab,
                                 nn::Tensor vectors, Provenance provenance)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)), provenance_(provenance) {
  if (!vocab_ || vectors_.rank() != 2 || vectors_.dim(0) != vocab_->size()) {
    throw DataError("embedding matrix rows do not match the vocabulary size");
  }
  if (!vectors_.all_finite()) throw DataError("embedding matrix contains non-finite values");
}

namespace {

struct NegativeSampler {
  std::vector<double> cumulative;  // over vocabulary indices

  explicit NegativeSampler(const std::vector<std::size_t>& counts) {
    cumulative.resize(counts.size());
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      total += std::pow(static_cast<double>(counts[i]), 0.75);
      cumulative[i] = total;
    }
    for (double& c : cumulative) c /= total;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
  }
};

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// One logistic update of `input` against output row `target`. Returns the
// pair loss contribution and accumulates the input-side gradient.
double update_output(const double* input, double* output_row, double* input_grad,
                     std::size_t dim, double label, double lr) {
  double dot = 0.0;
  for (std::size_t d = 0; d < dim; ++d) dot += input[d] * output_row[d];
  const double p = nn::sigmoid(dot);
  const double g = (label - p) * lr;
  for (std::size_t d = 0; d < dim; ++d) {
    input_grad[d] += g * output_row[d];
    output_row[d] += g * input[d];
  }
  return label > 0.5 ? -log_sigmoid(dot) : -log_sigmoid(-dot);
}

std::vector<double> parse_vector_line(std::string_view line, std::size_t line_no,
                                      std::string& word) {
  std::size_t pos = line.find(' ');
  word = std::string(line.substr(0, pos));
  std::vector<double> values;
  while (pos != std::string_view::npos) {
    const std::size_t start = pos + 1;
    pos = line.find(' ', start);
    std::string_view field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (field.empty()) continue;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
      throw DataError("vector file line " + std::to_string(line_no) +
                      ": non-numeric component '" + std::string(field) + "'");
    }
    values.push_back(v);
  }
  return values;
}

std::string_view strip_cr(const std::string& line) {
  std::string_view v(line);
  while (!v.empty() && (v.back() == '\r' || v.back() == ' ')) v.remove_suffix(1);
  return v;
}

bool is_count_header(std::string_view line) {
  // word2vec text format starts with "<count> <dim>".
  const auto sp = line.find(' ');
  if (sp == std::string_view::npos || line.find(' ', sp + 1) != std::string_view::npos) {
    return false;
  }
  auto all_digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  return all_digits(line.substr(0, sp)) && all_digits(line.substr(sp + 1));
}

template <class OnRow>
std::size_t read_vectors(std::istream& in, OnRow&& on_row) {
  std::string raw;
  std::string word;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    if (line_no == 1 && is_count_header(line)) continue;
    auto values = parse_vector_line(line, line_no, word);
    if (dim == 0) {
      if (values.empty()) {
        throw DataError("vector file line " + std::to_string(line_no) + ": no components");
      }
      dim = values.size();
    } else if (values.size() != dim) {
      throw DataError("vector file line " + std::to_string(line_no) + ": expected " +
                      std::to_string(dim) + " components, found " +
                      std::to_string(values.size()));
    }
    on_row(word, std::move(values));
  }
  return dim;
}

}  // namespace

Word2VecResult train_word2vec(std::span<const text::Tokens> corpus, const Word2VecConfig& config,
                              std::uint64_t seed) {
  if (config.dim < 1 || config.window < 1 || config.negative < 1) {
    throw ConfigError("word2vec: dim, window and negative must all be >= 1");
  }
  auto vocab = std::make_shared<const text::Vocabulary>(
      text::build_vocab(corpus, std::max<std::size_t>(config.min_count, 1)));
  if (vocab->token_count() == 0) {
    throw DataError("word2vec: no token reaches min_count = " + std::to_string(config.min_count));
  }
  const std::size_t dim = config.dim;
  const std::size_t rows = vocab->size();

  std::vector<std::vector<std::size_t>> sentences;
  std::vector<std::size_t> counts(rows, 0);
  std::size_t total_words = 0;
  for (const auto& doc : corpus) {
    std::vector<std::size_t> ids;
    for (const auto& tok : doc) {
      if (auto idx = vocab->find(tok)) {
        ids.push_back(*idx);
        ++counts[*idx];
      }
    }
    total_words += ids.size();
    if (!ids.empty()) sentences.push_back(std::move(ids));
  }

  Rng rng(seed);
  nn::Tensor input({rows, dim});
  const double half = 0.5 / static_cast<double>(dim);
  for (std::size_t r = 2; r < rows; ++r) {
    for (double& v : input.row(r)) v = rng.uniform(-half, half);
  }
  nn::Tensor output({rows, dim});

  const NegativeSampler sampler(counts);
  std::vector<double> epoch_loss;
  const double planned = static_cast<double>(config.epochs) * static_cast<double>(total_words);
  std::size_t processed = 0;
  std::vector<double> hidden(dim);
  std::vector<double> grad(dim);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& full : sentences) {
      std::vector<std::size_t> sentence;
      if (config.subsample > 0.0) {
        const double threshold = config.subsample * static_cast<double>(total_words);
        for (std::size_t id : full) {
          const double f = static_cast<double>(counts[id]);
          const double keep = (std::sqrt(f / threshold) + 1.0) * threshold / f;
          if (keep >= 1.0 || rng.uniform() < keep) sentence.push_back(id);
        }
      } else {
        sentence = full;
      }
      const std::size_t n = sentence.size();
      for (std::size_t i = 0; i < n; ++i) {
        const double progress = planned > 0 ? static_cast<double>(processed) / planned : 0.0;
        const double lr = std::max(config.min_learning_rate, config.learning_rate * (1.0 - progress));
        ++processed;
        const std::size_t lo = i >= config.window ? i - config.window : 0;
        const std::size_t hi = std::min(n - 1, i + config.window);
        const std::size_t center = sentence[i];

        if (config.mode == Word2VecMode::cbow) {
          std::size_t ctx = 0;
          std::fill(hidden.begin(), hidden.end(), 0.0);
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            const auto row = input.row(sentence[j]);
            for (std::size_t d = 0; d < dim; ++d) hidden[d] += row[d];
            ++ctx;
          }
          if (ctx == 0) continue;
          for (double& h : hidden) h /= static_cast<double>(ctx);
          std::fill(grad.begin(), grad.end(), 0.0);
          double loss = update_output(hidden.data(), output.row(center).data(), grad.data(), dim,
                                      1.0, lr);
          for (std::size_t s = 0; s < config.negative; ++s) {
            const std::size_t neg = sampler.draw(rng);
            if (neg == center) continue;
            loss += update_output(hidden.data(), output.row(neg).data(), grad.data(), dim, 0.0, lr);
          }
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            auto row = input.row(sentence[j]);
            for (std::size_t d = 0; d < dim; ++d) row[d] += grad[d];
          }
          loss_sum += loss;
          ++pairs;
        } else {
          for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            auto row = input.row(sentence[j]);
            std::fill(grad.begin(), grad.end(), 0.0);
            double loss =
                update_output(row.data(), output.row(center).data(), grad.data(), dim, 1.0, lr);
            for (std::size_t s = 0; s < config.negative; ++s) {
              const std::size_t neg = sampler.draw(rng);
              if (neg == center) continue;
              loss += update_output(row.data(), output.row(neg).data(), grad.data(), dim, 0.0, lr);
            }
            for (std::size_t d = 0; d < dim; ++d) row[d] += grad[d];
            loss_sum += loss;
            ++pairs;
          }
        }
      }
    }
    epoch_loss.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  return {EmbeddingMatrix(std::move(vocab), std::move(input), Provenance::trained_word2vec),
          std::move(epoch_loss)};
}

EmbeddingMatrix load_glove(std::istream& in, std::shared_ptr<const text::Vocabulary> vocab) {
  std::vector<std::pair<std::size_t, std::vector<double>>> found;
  const std::size_t dim = read_vectors(in, [&](const std::string& word, std::vector<double> v) {
    if (auto idx = vocab->find(word)) found.emplace_back(*idx, std::move(v));
  });
  if (dim == 0) throw DataError("vector file is empty");
  nn::Tensor vectors({vocab->size(), dim});
  for (auto& [idx, v] : found) {
    if (idx < 2) continue;
    std::copy(v.begin(), v.end(), vectors.row(idx).begin());
  }
  return EmbeddingMatrix(std::move(vocab), std::move(vectors), Provenance::loaded_glove);
}

EmbeddingMatrix load_glove(std::istream& in) {
  std::vector<std::string> words;
  std::vector<double> flat;
  std::unordered_map<std::string, bool> seen;
  const std::size_t dim = read_vectors(in, [&](const std::string& word, std::vector<double> v) {
    if (word == "<pad>" || word == "<unk>") return;
    if (!seen.emplace(word, true).second) return;  // keep the first occurrence
    words.push_back(word);
    flat.insert(flat.end(), v.begin(), v.end());
  });
  if (dim == 0) throw DataError("vector file is empty");
  const std::size_t n = words.size();
  auto vocab = std::make_shared<const text::Vocabulary>(
      text::Vocabulary::from_tokens(std::move(words), std::vector<std::size_t>(n, 0), 0));
  nn::Tensor vectors({vocab->size(), dim});
  std::copy(flat.begin(), flat.end(), vectors.data() + 2 * dim);
  return EmbeddingMatrix(std::move(vocab), std::move(vectors), Provenance::loaded_glove);
}

void save_glove(std::ostream& out, const EmbeddingMatrix& matrix) {
  char buf[32];
  for (std::size_t i = 2; i < matrix.vocab().size(); ++i) {
    out << matrix.vocab().token(i);
    for (double v : matrix.row(i)) {
      std::snprintf(buf, sizeof buf, " %.6g", v);
      out << buf;
    }
    out << '\n';
  }
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Neighbor> cosine_knn(const EmbeddingMatrix& matrix, std::string_view query,
                                 std::size_t k) {
  const auto q = matrix.vocab().find(query);
  if (!q) throw DataError("'" + std::string(query) + "' is not in the embedding vocabulary");
  const auto qrow = matrix.row(*q);
  if (std::all_of(qrow.begin(), qrow.end(), [](double v) { return v == 0.0; })) {
    throw DataError("'" + std::string(query) + "' has a zero vector; similarity is undefined");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 2; i < matrix.vocab().size(); ++i) {
    if (i == *q) continue;
    scored.emplace_back(cosine(qrow, matrix.row(i)), i);
  }
  const std::size_t take = std::min(k, scored.size());
  auto better = [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), better);
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({matrix.vocab().token(scored[i].second), scored[i].first});
  }
  return out;
}

nn::Tensor embed_sequence(const text::TokenSequence& seq, const EmbeddingMatrix& matrix) {
  const std::size_t dim = matrix.dim();
  nn::Tensor out({seq.capacity(), dim});
  for (std::size_t i = 0; i < seq.capacity(); ++i) {
    const std::size_t idx = seq.indices[i];
    if (idx == text::kPad) continue;
    const auto src = matrix.row(idx);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::vector<std::string> closest_spellings(const text::Vocabulary& vocab, std::string_view word,
                                           std::size_t count) {
  std::vector<std::pair<std::size_t, std::size_t>> scored;  // distance, index
  std::vector<std::size_t> prev(word.size() + 1);
  std::vector<std::size_t> cur(word.size() + 1);
  for (std::size_t i = 2; i < vocab.size(); ++i) {
    const std::string& t = vocab.token(i);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t a = 1; a <= t.size(); ++a) {
      cur[0] = a;
      for (std::size_t b = 1; b <= word.size(); ++b) {
        const std::size_t sub = prev[b - 1] + (t[a - 1] == word[b - 1] ? 0 : 1);
        cur[b] = std::min({prev[b] + 1, cur[b - 1] + 1, sub});
      }
      std::swap(prev, cur);
    }
    scored.emplace_back(prev[word.size()], i);
  }
  const std::size_t take = std::min(count, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(vocab.token(scored[i].second));
  return out;
}

}  // namespace railcause::embed
