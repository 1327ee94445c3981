#include <stdexcept>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "gradcases.hpp"
#include "railcause/errors.hpp"
#include "railcause/eval.hpp"
#include "railcause/train.hpp"
#include "railcause/vectorize.hpp"
#include "synthetic.hpp"

using namespace railcause;
using namespace railcause::models;
using railcause::nn::Tensor;

namespace {

struct Prepared {
  ModelSpec spec;
  std::vector<ModelInput> inputs;
  std::vector<std::size_t> labels;
  Tensor embedding;
};

Prepared prepare(Architecture arch, std::size_t n_docs, std::uint64_t seed) {
  const auto docs = testing::keyword_corpus(n_docs, seed);
  std::vector<text::Tokens> tokens;
  Prepared p;
  for (const auto& d : docs) {
    tokens.push_back(text::tokenize(d.narrative));
    p.labels.push_back(d.label);
  }
  auto vocab = std::make_shared<const text::Vocabulary>(text::build_vocab(tokens));
  p.spec.architecture = arch;
  p.spec.num_classes = 5;
  p.spec.dropout = 0.1;
  p.inputs.resize(docs.size());
  if (arch == Architecture::dnn) {
    const auto tfidf = vectorize::fit_tfidf(tokens, vocab);
    p.spec.input_dim = tfidf.dimension();
    p.spec.hidden_layers = 2;
    p.spec.hidden_units = 32;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      p.inputs[i].features = vectorize::tfidf_transform(tfidf, tokens[i]);
    }
  } else {
    p.spec.vocab_size = vocab->size();
    p.spec.embedding_dim = 16;
    p.spec.embedding_trainable = true;
    p.spec.sequence_length = 50;
    p.spec.conv_layers = 2;
    p.spec.conv_filters = 16;
    p.spec.kernel_size = 3;
    p.spec.pool_size = 2;
    p.spec.cnn_dense_units = 16;
    p.spec.gru_layers = 1;
    p.spec.gru_units = 16;
    p.spec.rnn_dense_units = 16;
    Rng rng(seed);
    p.embedding = testing::random_tensor({vocab->size(), 16}, rng);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      p.inputs[i].sequence = text::encode(tokens[i], *vocab, p.spec.sequence_length);
    }
  }
  return p;
}

double train_f1(const Network& net, const Prepared& p) {
  std::vector<std::size_t> pred;
  for (const auto& in : p.inputs) pred.push_back(predict(net, in));
  return eval::macro_f1(p.labels, pred, p.spec.num_classes);
}

std::vector<Tensor> snapshot(const Network& net) {
  std::vector<Tensor> out;
  for (const auto& p : net.parameters()) out.push_back(*p.tensor);
  return out;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("all three architectures fit the keyword corpus") {
    for (auto arch : {Architecture::dnn, Architecture::cnn, Architecture::rnn}) {
      CAPTURE(name(arch));
      const auto p = prepare(arch, 400, 1);
      auto net = build(p.spec, 2, p.embedding.empty() ? nullptr : &p.embedding);
      TrainConfig c;
      c.epochs = 8;
      c.batch_size = 16;
      c.validation_fraction = 0.0;
      c.optimizer.learning_rate = arch == Architecture::dnn ? 1e-3 : 5e-3;
      const auto h = train(*net, p.inputs, p.labels, c);
      REQUIRE(h.epochs.size() == 8);
      CHECK(h.epochs[1].train_loss < h.epochs[0].train_loss);
      CHECK(h.epochs[2].train_loss < h.epochs[1].train_loss);
      CHECK(train_f1(*net, p) >= 0.95);
    }
  }

  TEST_CASE("zero epochs leave the initialization") {
    const auto p = prepare(Architecture::dnn, 50, 2);
    auto net = build(p.spec, 3);
    const auto before = snapshot(*net);
    TrainConfig c;
    c.epochs = 0;
    const auto h = train(*net, p.inputs, p.labels, c);
    CHECK(h.epochs.empty());
    CHECK(snapshot(*net) == before);
  }

  TEST_CASE("identical seeds give identical parameters") {
    for (std::size_t threads : {1u, 3u}) {
      const auto p = prepare(Architecture::rnn, 100, 4);
      TrainConfig c;
      c.epochs = 2;
      c.batch_size = 8;
      c.threads = threads;
      c.seed = 5;
      auto a = build(p.spec, 1, &p.embedding), b = build(p.spec, 1, &p.embedding);
      const auto ha = train(*a, p.inputs, p.labels, c);
      const auto hb = train(*b, p.inputs, p.labels, c);
      CHECK(snapshot(*a) == snapshot(*b));
      CHECK(ha.epochs.back().train_loss == hb.epochs.back().train_loss);
    }
  }

  TEST_CASE("frozen embeddings never change") {
    for (auto arch : {Architecture::cnn, Architecture::rnn}) {
      auto p = prepare(arch, 60, 6);
      p.spec.embedding_trainable = false;
      auto net = build(p.spec, 1, &p.embedding);
      TrainConfig c;
      c.epochs = 2;
      c.batch_size = 8;
      train(*net, p.inputs, p.labels, c);
      for (const auto& param : net->parameters()) {
        if (param.name == "embedding") {
          Tensor expected = p.embedding;
          for (std::size_t r = 0; r < 2; ++r)
            for (double& v : expected.row(r)) v = 0.0;
          CHECK(*param.tensor == expected);
        }
      }
    }
  }

  TEST_CASE("early stopping keeps the best validation epoch") {
    const auto p = prepare(Architecture::dnn, 200, 7);
    auto net = build(p.spec, 1);
    TrainConfig c;
    c.epochs = 12;
    c.batch_size = 16;
    c.patience = 2;
    c.validation_fraction = 0.2;
    const auto h = train(*net, p.inputs, p.labels, c);
    REQUIRE_FALSE(h.epochs.empty());
    double best = -1;
    std::size_t best_epoch = 0;
    for (const auto& e : h.epochs) {
      REQUIRE(e.validation_macro_f1.has_value());
      if (*e.validation_macro_f1 > best) {
        best = *e.validation_macro_f1;
        best_epoch = e.epoch;
      }
    }
    CHECK(h.restored_epoch == best_epoch);
    if (h.stopped_early) CHECK(h.epochs.size() < 12);
  }

  TEST_CASE("divergence is reported with its epoch and batch") {
    const auto p = prepare(Architecture::dnn, 40, 8);
    auto net = build(p.spec, 1);
    for (const auto& param : net->parameters()) {
      if (param.name == "output.bias") (*param.tensor)[0] = std::numeric_limits<double>::infinity();
    }
    TrainConfig c;
    c.epochs = 1;
    c.validation_fraction = 0.0;
    try {
      train(*net, p.inputs, p.labels, c);
      FAIL("expected divergence");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
      CHECK(std::string(e.what()).find("batch") != std::string::npos);
    }
  }

  TEST_CASE("config validation and JSON round trip") {
    TrainConfig c;
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrainConfig{};
    c.validation_fraction = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = TrainConfig{};
    c.epochs = 3;
    c.optimizer.kind = nn::OptimizerKind::sgd;
    c.optimizer.learning_rate = 0.05;
    const auto back = train_config_from_json(to_json(c));
    CHECK(back.epochs == 3);
    CHECK(back.optimizer.kind == nn::OptimizerKind::sgd);
    CHECK(back.optimizer.learning_rate == 0.05);

    History h;
    h.epochs = {{1, 0.5, 0.25}, {2, 0.4, std::nullopt}};
    h.restored_epoch = 1;
    h.stopped_early = true;
    const auto hb = history_from_json(to_json(h));
    CHECK(hb.epochs.size() == 2);
    CHECK(hb.epochs[0].validation_macro_f1 == 0.25);
    CHECK_FALSE(hb.epochs[1].validation_macro_f1.has_value());
    CHECK(hb.restored_epoch == 1);
    CHECK(hb.stopped_early);
  }
}
