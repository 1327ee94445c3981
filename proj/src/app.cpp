#include "railcause/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "railcause/errors.hpp"
#include "railcause/io.hpp"
#include "railcause/rng.hpp"
#include "railcause/text.hpp"
#include "railcause/vectorize.hpp"

namespace railcause::app {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kInitSalt = 0x1417;
constexpr std::uint64_t kEmbeddingSalt = 0xe3bd;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

embed::Word2VecMode parse_w2v_mode(const std::string& s) {
  if (s == "cbow") return embed::Word2VecMode::cbow;
  if (s == "skip_gram" || s == "skipgram") return embed::Word2VecMode::skip_gram;
  throw ConfigError("unknown word2vec mode '" + s + "' (expected cbow|skip_gram)");
}

embed::Word2VecConfig w2v_from_json(const json& j) {
  check_keys(j,
             {"dim", "window", "mode", "negative", "epochs", "learning_rate", "min_learning_rate",
              "min_count", "subsample"},
             "embedding.word2vec");
  embed::Word2VecConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  read("dim", c.dim);
  read("window", c.window);
  if (j.contains("mode")) c.mode = parse_w2v_mode(j["mode"].get<std::string>());
  read("negative", c.negative);
  read("epochs", c.epochs);
  read("learning_rate", c.learning_rate);
  read("min_learning_rate", c.min_learning_rate);
  read("min_count", c.min_count);
  read("subsample", c.subsample);
  return c;
}

ordered_json w2v_to_json(const embed::Word2VecConfig& c) {
  ordered_json j;
  j["dim"] = c.dim;
  j["window"] = c.window;
  j["mode"] = c.mode == embed::Word2VecMode::cbow ? "cbow" : "skip_gram";
  j["negative"] = c.negative;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["min_learning_rate"] = c.min_learning_rate;
  j["min_count"] = c.min_count;
  j["subsample"] = c.subsample;
  return j;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

std::vector<corpus::LabeledRecord> read_labeled(const fs::path& path, corpus::LabelScheme scheme) {
  if (!fs::exists(path)) {
    throw DataError("prepared dataset " + path.string() + " not found; run `prepare` first");
  }
  std::istringstream in(io::read_file(path));
  const auto records = corpus::read_dataset(in);
  return corpus::apply_scheme(records, scheme);
}

std::vector<text::Tokens> tokenize_all(std::span<const corpus::LabeledRecord> records) {
  std::vector<text::Tokens> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back(text::tokenize(r.record.narrative));
  return docs;
}

void write_json(const fs::path& path, const ordered_json& j) {
  io::write_file_atomic(path, j.dump(2) + "\n");
}

corpus::LabelScheme dataset_scheme(const fs::path& dir) {
  const auto meta = dir / "dataset.json";
  if (!fs::exists(meta)) throw DataError(meta.string() + " not found; run `prepare` first");
  try {
    const auto j = json::parse(io::read_file(meta));
    return corpus::parse_scheme(j.at("scheme").get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(meta.string() + ": " + e.what());
  }
}

std::string csv_safe_name(std::string name) {
  for (auto& c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return name;
}

}  // namespace

fs::path RunConfig::resolved_model_dir() const {
  if (!model_dir.empty()) return model_dir;
  return output_dir / (std::string(models::name(embedding.kind)) + "_" +
                       std::string(models::name(model)));
}

void RunConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  if (min_count == 0) throw ConfigError("min_count must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw ConfigError("input file " + p.string() + " does not exist");
  }
  if (embedding.kind == models::FeatureKind::glove && !embedding.path.empty() &&
      !fs::exists(embedding.path)) {
    throw ConfigError("embedding file " + embedding.path.string() + " does not exist");
  }
  if (column_map.narratives.empty()) throw ConfigError("column_map.narratives must not be empty");
  if (baseline.alpha <= 0.0) throw ConfigError("baseline.alpha must be > 0");
  if (baseline.lambda <= 0.0) throw ConfigError("baseline.lambda must be > 0");
  if (!model_spec.is_object()) throw ConfigError("model_spec must be a JSON object");
  train.validate();
}

RunConfig config_from_json(const json& j, const fs::path& base_dir) {
  try {
    check_keys(j,
               {"inputs", "column_map", "scheme", "test_fraction", "min_count", "embedding", "model",
                "model_spec", "train", "baseline", "output_dir", "model_dir", "seed"},
               "config");
    RunConfig c;
    if (j.contains("inputs")) {
      for (const auto& p : j["inputs"]) c.inputs.push_back(resolve(base_dir, p.get<std::string>()));
    }
    if (j.contains("column_map")) {
      const auto& m = j["column_map"];
      check_keys(m, {"id", "year", "cause", "narratives"}, "column_map");
      if (m.contains("id")) c.column_map.id = m["id"].get<std::string>();
      if (m.contains("year")) c.column_map.year = m["year"].get<std::string>();
      if (m.contains("cause")) c.column_map.cause = m["cause"].get<std::string>();
      if (m.contains("narratives")) {
        c.column_map.narratives = m["narratives"].get<std::vector<std::string>>();
      }
    }
    if (j.contains("scheme")) c.scheme = corpus::parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("test_fraction")) c.test_fraction = j["test_fraction"].get<double>();
    if (j.contains("min_count")) c.min_count = j["min_count"].get<std::size_t>();
    if (j.contains("embedding")) {
      const auto& e = j["embedding"];
      check_keys(e, {"kind", "path", "word2vec"}, "embedding");
      if (e.contains("kind")) c.embedding.kind = models::parse_feature_kind(e["kind"].get<std::string>());
      if (e.contains("path")) c.embedding.path = resolve(base_dir, e["path"].get<std::string>());
      if (e.contains("word2vec")) c.embedding.word2vec = w2v_from_json(e["word2vec"]);
    }
    if (j.contains("model")) c.model = models::parse_model_kind(j["model"].get<std::string>());
    if (j.contains("model_spec")) {
      check_keys(j["model_spec"],
                 {"architecture", "num_classes", "input_dim", "hidden_layers", "hidden_units",
                  "vocab_size", "sequence_length", "embedding_dim", "embedding_trainable",
                  "conv_layers", "conv_filters", "kernel_size", "pool_size", "cnn_dense_units",
                  "gru_layers", "gru_units", "rnn_dense_units", "dropout"},
                 "model_spec");
      c.model_spec = j["model_spec"];
    }
    if (j.contains("train")) {
      check_keys(j["train"],
                 {"epochs", "batch_size", "optimizer", "learning_rate", "beta1", "beta2", "epsilon",
                  "validation_fraction", "patience", "seed", "threads"},
                 "train");
      c.train = models::train_config_from_json(j["train"]);
    }
    if (j.contains("baseline")) {
      const auto& b = j["baseline"];
      check_keys(b, {"alpha", "lambda", "epochs"}, "baseline");
      if (b.contains("alpha")) c.baseline.alpha = b["alpha"].get<double>();
      if (b.contains("lambda")) c.baseline.lambda = b["lambda"].get<double>();
      if (b.contains("epochs")) c.baseline.epochs = b["epochs"].get<std::size_t>();
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    if (j.contains("model_dir")) c.model_dir = resolve(base_dir, j["model_dir"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["inputs"] = ordered_json::array();
  for (const auto& p : c.inputs) j["inputs"].push_back(p.string());
  j["column_map"] = {{"id", c.column_map.id},
                     {"year", c.column_map.year},
                     {"cause", c.column_map.cause},
                     {"narratives", c.column_map.narratives}};
  j["scheme"] = corpus::name(c.scheme);
  j["test_fraction"] = c.test_fraction;
  j["min_count"] = c.min_count;
  j["embedding"] = {{"kind", models::name(c.embedding.kind)},
                    {"path", c.embedding.path.string()},
                    {"word2vec", w2v_to_json(c.embedding.word2vec)}};
  j["model"] = models::name(c.model);
  j["model_spec"] = ordered_json::parse(c.model_spec.dump());
  j["train"] = ordered_json::parse(models::to_json(c.train).dump());
  j["baseline"] = {{"alpha", c.baseline.alpha},
                   {"lambda", c.baseline.lambda},
                   {"epochs", c.baseline.epochs}};
  j["output_dir"] = c.output_dir.string();
  j["model_dir"] = c.model_dir.string();
  j["seed"] = c.seed;
  return j;
}

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

PrepareResult cmd_prepare(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.inputs.empty()) throw ConfigError("no input files configured");

  PrepareResult result;
  std::vector<corpus::AccidentRecord> records;
  std::unordered_set<std::string> seen;
  for (const auto& path : config.inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    corpus::IngestResult ingested;
    try {
      ingested = corpus::load_records(in, config.column_map);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    result.report += ingested.report;
    const std::unordered_set<std::string> file_ids = [&] {
      std::unordered_set<std::string> ids;
      for (const auto& r : ingested.records) ids.insert(r.id);
      return ids;
    }();
    for (auto& r : ingested.records) {
      if (!r.id.empty() && !seen.insert(r.id).second && !file_ids.contains(r.id)) {
        ++result.report.duplicate_ids;
      }
      records.push_back(std::move(r));
    }
  }

  const auto labeled = corpus::apply_scheme(records, config.scheme);
  const auto& classes = corpus::class_names(config.scheme);
  corpus::DatasetSplit split;
  split.seed = config.seed;
  split.test_fraction = config.test_fraction;
  if (labeled.empty()) {
    result.warnings.push_back("no usable records in the input; wrote an empty dataset");
  } else {
    split = corpus::stratified_split(labeled, config.test_fraction, config.seed);
    result.distribution = corpus::label_distribution(labeled, classes.size());
  }
  result.train_size = split.train.size();
  result.test_size = split.test.size();

  auto records_of = [](const std::vector<corpus::LabeledRecord>& v) {
    std::vector<corpus::AccidentRecord> out;
    out.reserve(v.size());
    for (const auto& r : v) out.push_back(r.record);
    return out;
  };
  const auto& dir = config.output_dir;
  std::ostringstream train_out, test_out, vocab_out, dist;
  corpus::write_dataset(train_out, records_of(split.train));
  corpus::write_dataset(test_out, records_of(split.test));
  const auto docs = tokenize_all(split.train);
  text::build_vocab(docs, config.min_count).save(vocab_out);

  dist << "label,count,share\n";
  std::size_t total = 0;
  for (auto n : result.distribution) total += n;
  for (std::size_t c = 0; c < result.distribution.size(); ++c) {
    dist << classes[c] << ',' << result.distribution[c] << ','
         << fmt(static_cast<double>(result.distribution[c]) / static_cast<double>(total)) << '\n';
  }

  const auto& rep = result.report;
  ordered_json ingest{{"rows_read", rep.rows_read},         {"accepted", rep.accepted},
                      {"missing_cause", rep.missing_cause}, {"empty_narrative", rep.empty_narrative},
                      {"malformed_code", rep.malformed_code}, {"short_rows", rep.short_rows},
                      {"duplicate_ids", rep.duplicate_ids}, {"labeled", labeled.size()},
                      {"train", result.train_size},        {"test", result.test_size}};
  ordered_json meta{{"scheme", corpus::name(config.scheme)},
                    {"classes", classes},
                    {"test_fraction", config.test_fraction},
                    {"seed", config.seed}};

  io::write_file_atomic(dir / "train.jsonl", train_out.str());
  io::write_file_atomic(dir / "test.jsonl", test_out.str());
  io::write_file_atomic(dir / "vocab.tsv", vocab_out.str());
  io::write_file_atomic(dir / "distribution.csv", dist.str());
  write_json(dir / "ingest.json", ingest);
  write_json(dir / "dataset.json", meta);
  write_json(dir / "config.resolved.json", to_json(config));

  for (const auto& w : result.warnings) log << "warning: " << w << '\n';
  log << "rows read " << rep.rows_read << ", accepted " << rep.accepted << ", labeled "
      << labeled.size() << " (train " << result.train_size << ", test " << result.test_size
      << ")\n";
  for (std::size_t c = 0; c < result.distribution.size(); ++c) {
    log << "  " << std::left << std::setw(10) << classes[c] << result.distribution[c] << '\n';
  }
  return result;
}

models::TrainedModel train_model(const RunConfig& config,
                                 std::span<const corpus::LabeledRecord> train_set, std::ostream& log,
                                 std::optional<embed::EmbeddingMatrix>* embeddings) {
  config.validate();
  models::check_pairing(config.embedding.kind, config.model);
  if (train_set.empty()) throw DataError("training set is empty");

  models::TrainedModel m;
  m.kind = config.model;
  m.features = config.embedding.kind;
  m.scheme = config.scheme;
  m.class_names = corpus::class_names(config.scheme);
  m.train_config = config.train;
  m.train_config.seed = config.seed;
  const std::size_t k = m.class_names.size();

  const auto docs = tokenize_all(train_set);
  std::vector<std::size_t> labels;
  labels.reserve(train_set.size());
  for (const auto& r : train_set) labels.push_back(r.label);

  std::optional<embed::EmbeddingMatrix> emb;
  if (m.features == models::FeatureKind::tfidf) {
    m.vocab = std::make_shared<const text::Vocabulary>(text::build_vocab(docs, config.min_count));
    m.tfidf.emplace(vectorize::fit_tfidf(docs, m.vocab));
  } else if (m.features == models::FeatureKind::word2vec) {
    log << "training word2vec on " << docs.size() << " narratives\n";
    auto w2v = embed::train_word2vec(docs, config.embedding.word2vec,
                                     mix_seed(config.seed, kEmbeddingSalt));
    for (std::size_t e = 0; e < w2v.epoch_loss.size(); ++e) {
      log << "  word2vec epoch " << e + 1 << " loss " << fmt(w2v.epoch_loss[e]) << '\n';
    }
    emb.emplace(std::move(w2v.embeddings));
    m.vocab = emb->vocab_ptr();
  } else {
    if (config.embedding.path.empty()) throw ConfigError("glove embedding requires embedding.path");
    m.vocab = std::make_shared<const text::Vocabulary>(text::build_vocab(docs, config.min_count));
    std::ifstream in(config.embedding.path);
    if (!in) throw DataError("cannot open " + config.embedding.path.string());
    emb.emplace(embed::load_glove(in, m.vocab));
  }

  std::vector<vectorize::SparseVector> features;
  if (m.tfidf) {
    features.reserve(docs.size());
    for (const auto& d : docs) features.push_back(vectorize::tfidf_transform(*m.tfidf, d));
  }

  switch (m.kind) {
    case models::ModelKind::nbc:
      m.nbc = baselines::fit_nbc(features, labels, k, m.tfidf->dimension(), config.baseline.alpha);
      break;
    case models::ModelKind::svm:
      m.svm = baselines::fit_svm(features, labels, k, m.tfidf->dimension(), config.baseline.lambda,
                                 config.baseline.epochs, config.seed);
      break;
    default: {
      models::ModelSpec spec = models::spec_from_json(config.model_spec);
      spec.architecture = m.kind == models::ModelKind::dnn   ? models::Architecture::dnn
                          : m.kind == models::ModelKind::cnn ? models::Architecture::cnn
                                                             : models::Architecture::rnn;
      spec.num_classes = k;
      if (m.tfidf) spec.input_dim = m.tfidf->dimension();
      if (emb) {
        spec.vocab_size = emb->vocab().size();
        spec.embedding_dim = emb->dim();
      }
      spec.validate();
      m.network = models::build(spec, mix_seed(config.seed, kInitSalt),
                                emb ? &emb->vectors() : nullptr);
      std::vector<models::ModelInput> inputs(docs.size());
      for (std::size_t i = 0; i < docs.size(); ++i) {
        if (m.tfidf) inputs[i].features = std::move(features[i]);
        else inputs[i].sequence = text::encode(docs[i], *m.vocab, spec.sequence_length);
      }
      log << "training " << models::name(m.kind) << " (" << m.network->parameter_count()
          << " parameters, " << m.network->trainable_parameter_count() << " trainable)\n";
      m.history = models::train(*m.network, inputs, labels, m.train_config,
                                [&](const models::EpochRecord& r) {
                                  log << "  epoch " << r.epoch << " loss " << fmt(r.train_loss);
                                  if (r.validation_macro_f1) {
                                    log << " val macro-F1 " << fmt(*r.validation_macro_f1);
                                  }
                                  log << '\n';
                                });
    }
  }
  if (embeddings) *embeddings = std::move(emb);
  return m;
}

TrainResult cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  models::check_pairing(config.embedding.kind, config.model);
  const auto stored = dataset_scheme(config.output_dir);
  if (stored != config.scheme) {
    throw ConfigError("prepared dataset uses the " + std::string(corpus::name(stored)) +
                      " scheme but the config asks for " + std::string(corpus::name(config.scheme)));
  }
  const auto train_set = read_labeled(config.output_dir / "train.jsonl", config.scheme);

  std::optional<embed::EmbeddingMatrix> emb;
  const auto model = train_model(config, train_set, log, &emb);

  const auto dir = config.resolved_model_dir();
  TrainResult result{dir / "model.json", model.history};
  models::save_model(model, result.model_path);

  std::ostringstream hist;
  hist << "epoch,train_loss,validation_macro_f1\n";
  for (const auto& r : model.history.epochs) {
    hist << r.epoch << ',' << fmt(r.train_loss) << ','
         << (r.validation_macro_f1 ? fmt(*r.validation_macro_f1) : "") << '\n';
  }
  io::write_file_atomic(dir / "history.csv", hist.str());
  if (emb && model.features == models::FeatureKind::word2vec) {
    std::ostringstream vec;
    embed::save_glove(vec, *emb);
    io::write_file_atomic(dir / "embeddings.txt", vec.str());
  }
  write_json(dir / "config.resolved.json", to_json(config));
  log << "model written to " << result.model_path.string() << '\n';
  return result;
}

EvaluateResult evaluate(const models::TrainedModel& model,
                        std::span<const corpus::LabeledRecord> records, eval::OvrRoc* roc) {
  const std::size_t k = model.num_classes();
  std::vector<std::size_t> truth, pred;
  nn::Tensor proba({records.size(), k});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto p = model.predict_proba(std::string_view(records[i].record.narrative));
    std::copy(p.begin(), p.end(), proba.data() + i * k);
    truth.push_back(records[i].label);
    pred.push_back(baselines::argmax(p));
  }
  EvaluateResult r{eval::confusion(truth, pred, k, model.class_names), {}};
  r.metrics = eval::metrics(r.confusion);
  if (roc) *roc = eval::ovr_roc(proba, truth);
  return r;
}

EvaluateResult cmd_evaluate(const RunConfig& config, const fs::path& model_file, std::ostream& out) {
  const auto model = models::load_model(model_file);
  const auto stored = dataset_scheme(config.output_dir);
  if (stored != model.scheme) {
    throw ConfigError("model was trained on the " + std::string(corpus::name(model.scheme)) +
                      " scheme but the prepared dataset uses " + std::string(corpus::name(stored)));
  }
  const auto test = read_labeled(config.output_dir / "test.jsonl", model.scheme);
  if (test.empty()) throw DataError("test set is empty");

  eval::OvrRoc roc;
  auto result = evaluate(model, test, &roc);
  const auto dir = model_file.parent_path();

  ordered_json j;
  j["model"] = model_file.filename().string();
  j["scheme"] = corpus::name(model.scheme);
  j["samples"] = test.size();
  j["macro_f1"] = result.metrics.macro_f1;
  j["micro_f1"] = result.metrics.micro_f1;
  j["accuracy"] = result.metrics.accuracy;
  j["per_class"] = ordered_json::array();
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    const auto& m = result.metrics.per_class[c];
    ordered_json row{{"class", model.class_names[c]},
                     {"precision", m.precision},
                     {"recall", m.recall},
                     {"f1", m.f1},
                     {"support", m.support}};
    if (roc.curves[c]) row["auc"] = roc.curves[c]->auc;
    j["per_class"].push_back(row);
  }
  j["warnings"] = roc.warnings;
  write_json(dir / "metrics.json", j);
  io::write_file_atomic(dir / "confusion.csv", result.confusion.to_csv());
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    if (!roc.curves[c]) continue;
    io::write_file_atomic(dir / ("roc_" + csv_safe_name(model.class_names[c]) + ".csv"),
                          eval::roc_to_csv(*roc.curves[c]));
  }

  for (const auto& w : roc.warnings) out << "warning: " << w << '\n';
  out << "macro-F1 " << fmt(result.metrics.macro_f1) << "  accuracy "
      << fmt(result.metrics.accuracy) << "  (" << test.size() << " test narratives)\n";
  return result;
}

std::vector<RankedCause> rank_causes(const models::TrainedModel& model, std::string_view narrative,
                                     std::size_t top) {
  const auto p = model.predict_proba(narrative);
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] > p[b]; });
  order.resize(std::min(top, order.size()));
  std::vector<RankedCause> out;
  for (auto c : order) out.push_back({model.class_names[c], p[c]});
  return out;
}

void cmd_predict(const fs::path& model_file, std::string_view narrative, std::size_t top, bool as_json,
                 std::ostream& out) {
  if (top == 0) throw ConfigError("--top must be >= 1");
  const auto model = models::load_model(model_file);
  const auto ranked = rank_causes(model, narrative, top);
  if (as_json) {
    ordered_json j;
    j["model"] = models::name(model.kind);
    j["scheme"] = corpus::name(model.scheme);
    j["predictions"] = ordered_json::array();
    for (const auto& r : ranked) {
      j["predictions"].push_back({{"cause", r.cause}, {"probability", r.probability}});
    }
    out << j.dump(2) << '\n';
    return;
  }
  out << "rank  cause      probability\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out << std::left << std::setw(6) << i + 1 << std::setw(11) << ranked[i].cause
        << fmt(ranked[i].probability) << '\n';
  }
}

std::vector<embed::Neighbor> cmd_inspect(const fs::path& embedding_file, std::string_view word,
                                         std::size_t k, bool as_json, std::ostream& out) {
  std::ifstream in(embedding_file);
  if (!in) throw DataError("cannot open " + embedding_file.string());
  const auto matrix = embed::load_glove(in);
  const auto& vocab = matrix.vocab();
  const auto index = vocab.find(word);
  if (!index || *index < 2) {
    std::string msg = "'" + std::string(word) + "' is not in the embedding vocabulary";
    const auto close = embed::closest_spellings(vocab, word, 5);
    if (!close.empty()) {
      msg += "; closest: ";
      for (std::size_t i = 0; i < close.size(); ++i) msg += (i ? ", " : "") + close[i];
    }
    throw DataError(msg);
  }
  const auto neighbors = embed::cosine_knn(matrix, word, k);
  if (as_json) {
    ordered_json j;
    j["word"] = word;
    j["neighbors"] = ordered_json::array();
    for (const auto& n : neighbors) {
      j["neighbors"].push_back({{"token", n.token}, {"similarity", n.similarity}});
    }
    out << j.dump(2) << '\n';
  } else {
    for (const auto& n : neighbors) out << n.token << '\t' << fmt(n.similarity) << '\n';
  }
  return neighbors;
}

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 3;
  } catch (const TrainingError& e) {
    err << "training failed: " << e.what() << '\n';
    return 4;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace railcause::app
