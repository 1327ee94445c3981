#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railcause/baselines.hpp"
#include "railcause/corpus.hpp"
#include "railcause/embed.hpp"
#include "railcause/models.hpp"
#include "railcause/train.hpp"
#include "railcause/vectorize.hpp"

namespace railcause::models {

enum class ModelKind { dnn, cnn, rnn, nbc, svm };
enum class FeatureKind { tfidf, word2vec, glove };

std::string_view name(ModelKind kind);
std::string_view name(FeatureKind kind);
ModelKind parse_model_kind(std::string_view text);
FeatureKind parse_feature_kind(std::string_view text);

/// Throws ConfigError for pairings that cannot work: sequence models need
/// word embeddings, the DNN and the baselines need tf-idf.
void check_pairing(FeatureKind features, ModelKind model);

/// A trained classifier with everything needed to go from raw narrative
/// text to class probabilities.
struct TrainedModel {
  ModelKind kind = ModelKind::dnn;
  FeatureKind features = FeatureKind::tfidf;
  corpus::LabelScheme scheme = corpus::LabelScheme::general;
  std::vector<std::string> class_names;
  std::shared_ptr<const text::Vocabulary> vocab;
  std::optional<vectorize::TfIdfModel> tfidf;  // dnn, nbc, svm
  std::unique_ptr<Network> network;            // dnn, cnn, rnn
  std::optional<baselines::NbcModel> nbc;
  std::optional<baselines::LinearSvmModel> svm;
  TrainConfig train_config;
  History history;

  std::size_t num_classes() const { return class_names.size(); }

  /// Tokenize, then encode (sequence models) or tf-idf weight (the rest).
  ModelInput prepare(std::string_view narrative) const;

  /// Class probabilities. The SVM reports a softmax over its decision values.
  std::vector<double> predict_proba(const ModelInput& input) const;
  std::vector<double> predict_proba(std::string_view narrative) const;

  /// Argmax of predict_proba, lowest index on ties.
  std::size_t predict(std::string_view narrative) const;
};

/// Writes `<stem>.json` (sidecar: kind, spec, scheme, history, baseline
/// weights), `<stem>.bin` (named-tensor container) and `<stem>.vocab.tsv`
/// next to `json_path`.
void save_model(const TrainedModel& model, const std::filesystem::path& json_path);
TrainedModel load_model(const std::filesystem::path& json_path);

}  // namespace railcause::models
