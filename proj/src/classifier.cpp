#include "railcause/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "railcause/errors.hpp"
#include "railcause/io.hpp"
#include "railcause/nn/container.hpp"
#include "railcause/nn/ops.hpp"

namespace railcause::models {

std::string_view name(ModelKind kind) {
  switch (kind) {
    case ModelKind::dnn: return "dnn";
    case ModelKind::cnn: return "cnn";
    case ModelKind::rnn: return "rnn";
    case ModelKind::nbc: return "nbc";
    case ModelKind::svm: return "svm";
  }
  return "?";
}

std::string_view name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::tfidf: return "tfidf";
    case FeatureKind::word2vec: return "word2vec";
    case FeatureKind::glove: return "glove";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::dnn, ModelKind::cnn, ModelKind::rnn, ModelKind::nbc, ModelKind::svm}) {
    if (name(k) == text) return k;
  }
  throw ConfigError("unknown model '" + std::string(text) + "' (expected dnn|cnn|rnn|nbc|svm)");
}

FeatureKind parse_feature_kind(std::string_view text) {
  for (auto k : {FeatureKind::tfidf, FeatureKind::word2vec, FeatureKind::glove}) {
    if (name(k) == text) return k;
  }
  throw ConfigError("unknown embedding '" + std::string(text) +
                    "' (expected word2vec|glove|tfidf)");
}

void check_pairing(FeatureKind features, ModelKind model) {
  const bool sequence = model == ModelKind::cnn || model == ModelKind::rnn;
  if (sequence && features == FeatureKind::tfidf) {
    throw ConfigError("model '" + std::string(name(model)) +
                      "' is a sequence model and requires word embeddings (word2vec or glove)");
  }
  if (!sequence && features != FeatureKind::tfidf) {
    throw ConfigError("model '" + std::string(name(model)) + "' requires tf-idf features");
  }
}

ModelInput TrainedModel::prepare(std::string_view narrative) const {
  ModelInput input;
  const auto tokens = text::tokenize(narrative);
  if (tfidf) input.features = vectorize::tfidf_transform(*tfidf, tokens);
  if (network && network->spec().architecture != Architecture::dnn) {
    input.sequence = text::encode(tokens, *vocab, network->spec().sequence_length);
  }
  return input;
}

std::vector<double> TrainedModel::predict_proba(const ModelInput& input) const {
  switch (kind) {
    case ModelKind::dnn:
    case ModelKind::cnn:
    case ModelKind::rnn:
      return models::predict_proba(*network, input);
    case ModelKind::nbc:
      return baselines::posterior(*nbc, input.features);
    case ModelKind::svm: {
      const auto scores = baselines::predict(*svm, input.features).scores;
      const nn::Tensor p = nn::softmax(nn::Tensor({scores.size()}, scores));
      return {p.values().begin(), p.values().end()};
    }
  }
  return {};
}

std::vector<double> TrainedModel::predict_proba(std::string_view narrative) const {
  return predict_proba(prepare(narrative));
}

std::size_t TrainedModel::predict(std::string_view narrative) const {
  const auto p = predict_proba(narrative);
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

namespace {

std::filesystem::path sibling(const std::filesystem::path& json_path, const char* suffix) {
  auto p = json_path;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& json_path) {
  const auto bin_path = sibling(json_path, ".bin");
  const auto vocab_path = sibling(json_path, ".vocab.tsv");

  std::vector<nn::NamedTensor> tensors;
  if (model.network) {
    for (const auto& p : model.network->parameters()) tensors.emplace_back(p.name, *p.tensor);
  }
  if (model.tfidf) {
    const auto& idf = model.tfidf->idf();
    tensors.emplace_back("tfidf.idf", nn::Tensor({idf.size()}, idf));
  }
  std::ostringstream bin;
  nn::write_container(bin, tensors);
  std::ostringstream vocab;
  model.vocab->save(vocab);

  nlohmann::ordered_json j;
  j["format"] = "railcause-model";
  j["version"] = 1;
  j["kind"] = name(model.kind);
  j["features"] = name(model.features);
  j["scheme"] = corpus::name(model.scheme);
  j["classes"] = model.class_names;
  j["tensors"] = bin_path.filename().string();
  j["vocab"] = vocab_path.filename().string();
  if (model.network) j["spec"] = to_json(model.network->spec());
  if (model.nbc) j["baseline"] = baselines::to_json(*model.nbc);
  if (model.svm) j["baseline"] = baselines::to_json(*model.svm);
  j["train_config"] = to_json(model.train_config);
  j["history"] = to_json(model.history);

  io::write_file_atomic(bin_path, bin.str());
  io::write_file_atomic(vocab_path, vocab.str());
  io::write_file_atomic(json_path, j.dump(2) + "\n");
}

TrainedModel load_model(const std::filesystem::path& json_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(json_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + json_path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "railcause-model") {
    throw DataError(json_path.string() + " is not a model file");
  }
  try {
    TrainedModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.features = parse_feature_kind(j.at("features").get<std::string>());
    m.scheme = corpus::parse_scheme(j.at("scheme").get<std::string>());
    m.class_names = j.at("classes").get<std::vector<std::string>>();
    const auto dir = json_path.parent_path();
    {
      std::istringstream vin(io::read_file(dir / j.at("vocab").get<std::string>()));
      m.vocab = std::make_shared<const text::Vocabulary>(text::Vocabulary::load(vin));
    }
    std::map<std::string, nn::Tensor> tensors;
    {
      std::istringstream bin(io::read_file(dir / j.at("tensors").get<std::string>()));
      for (auto& [n, t] : nn::read_container(bin)) tensors.emplace(n, std::move(t));
    }
    if (auto it = tensors.find("tfidf.idf"); it != tensors.end()) {
      const auto v = it->second.values();
      m.tfidf.emplace(m.vocab, std::vector<double>(v.begin(), v.end()));
    }
    if (j.contains("spec")) {
      m.network = build(spec_from_json(j["spec"]), 0);
      for (auto& p : m.network->parameters()) {
        auto it = tensors.find(p.name);
        if (it == tensors.end()) throw DataError("model tensors lack '" + p.name + "'");
        nn::require_shape(it->second, p.tensor->shape(), p.name.c_str());
        *p.tensor = std::move(it->second);
      }
    }
    if (m.kind == ModelKind::nbc) m.nbc = baselines::nbc_from_json(j.at("baseline"));
    if (m.kind == ModelKind::svm) m.svm = baselines::svm_from_json(j.at("baseline"));
    m.train_config = train_config_from_json(j.at("train_config"));
    m.history = history_from_json(j.at("history"));
    if (m.class_names.empty()) throw DataError("model file lists no classes");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file " + json_path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("model file " + json_path.string() + ": " + e.what());
  }
}

}  // namespace railcause::models
