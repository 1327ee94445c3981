#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "railcause/baselines.hpp"
#include "railcause/classifier.hpp"
#include "railcause/corpus.hpp"
#include "railcause/embed.hpp"
#include "railcause/eval.hpp"
#include "railcause/train.hpp"

/// Command implementations behind the `railcause` executable.
namespace railcause::app {

struct EmbeddingConfig {
  models::FeatureKind kind = models::FeatureKind::word2vec;
  std::filesystem::path path;  // glove vector file
  embed::Word2VecConfig word2vec{};
};

struct BaselineConfig {
  double alpha = 1.0;
  double lambda = 1e-4;
  std::size_t epochs = 10;
};

/// One run: where the raw data is, how to label and split it, which
/// (features, model) pair to train, and where outputs go.
///
/// Prepared datasets live in `output_dir`; each trained model gets its own
/// directory `output_dir/<features>_<model>` unless `model_dir` is set.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;
  corpus::ColumnMap column_map{"id", "year", "cause", {"narrative"}};
  corpus::LabelScheme scheme = corpus::LabelScheme::general;
  double test_fraction = 0.2;
  /// Minimum occurrence count for the tf-idf and GloVe vocabularies.
  std::size_t min_count = 1;
  EmbeddingConfig embedding{};
  models::ModelKind model = models::ModelKind::rnn;
  /// Overrides for models::ModelSpec fields. Sizes derived from the data
  /// (classes, input dimension, vocabulary, embedding width) always win.
  nlohmann::json model_spec = nlohmann::json::object();
  models::TrainConfig train{};
  BaselineConfig baseline{};
  std::filesystem::path output_dir = "out";
  std::filesystem::path model_dir;
  std::uint64_t seed = 0;

  std::filesystem::path resolved_model_dir() const;

  /// Throws ConfigError.
  void validate() const;
};

/// Relative paths are resolved against `base_dir`. Unknown keys are
/// rejected. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

struct PrepareResult {
  corpus::IngestReport report;
  std::vector<std::size_t> distribution;  // empty when nothing was accepted
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<std::string> warnings;
};

/// Ingests every input, labels, splits and writes train.jsonl, test.jsonl,
/// vocab.tsv, distribution.csv, ingest.json, dataset.json and
/// config.resolved.json into output_dir.
PrepareResult cmd_prepare(const RunConfig& config, std::ostream& log);

struct TrainResult {
  std::filesystem::path model_path;
  models::History history;
};

/// Trains the configured pair on output_dir/train.jsonl and writes
/// model.{json,bin,vocab.tsv}, history.csv, config.resolved.json and, for
/// word2vec, embeddings.txt into the model directory.
TrainResult cmd_train(const RunConfig& config, std::ostream& log);

/// Builds the trained classifier without writing anything.
models::TrainedModel train_model(const RunConfig& config,
                                 std::span<const corpus::LabeledRecord> train_set,
                                 std::ostream& log,
                                 std::optional<embed::EmbeddingMatrix>* embeddings = nullptr);

struct EvaluateResult {
  eval::ConfusionMatrix confusion;
  eval::MetricsReport metrics;
};

/// Scores `model` on labeled records.
EvaluateResult evaluate(const models::TrainedModel& model,
                        std::span<const corpus::LabeledRecord> records, eval::OvrRoc* roc = nullptr);

/// Scores the model on output_dir/test.jsonl and writes metrics.json,
/// confusion.csv and roc_<class>.csv next to the model file. Throws
/// ConfigError when the model and the prepared dataset use different label
/// schemes.
EvaluateResult cmd_evaluate(const RunConfig& config, const std::filesystem::path& model_file,
                            std::ostream& out);

struct RankedCause {
  std::string cause;
  double probability = 0.0;
};

/// The `top` most probable causes, descending (lower class index first on
/// ties). An empty narrative is scored like any other input.
std::vector<RankedCause> rank_causes(const models::TrainedModel& model, std::string_view narrative,
                                     std::size_t top);

void cmd_predict(const std::filesystem::path& model_file, std::string_view narrative,
                 std::size_t top, bool json, std::ostream& out);

/// Nearest neighbours of `word` in a vector file. An out-of-vocabulary word
/// raises DataError listing the closest spellings.
std::vector<embed::Neighbor> cmd_inspect(const std::filesystem::path& embedding_file,
                                         std::string_view word, std::size_t k, bool json,
                                         std::ostream& out);

/// Runs `body`, mapping ConfigError to 2, DataError to 3 and TrainingError
/// to 4 after printing the message to `err`.
int run_guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace railcause::app
