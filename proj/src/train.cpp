#include "railcause/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "railcause/corpus.hpp"
#include "railcause/errors.hpp"
#include "railcause/eval.hpp"
#include "railcause/rng.hpp"

namespace railcause::models {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("train config: validation_fraction must be in [0, 1)");
  }
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("train config: learning rate must be > 0");
  if (threads < 1) throw ConfigError("train config: threads must be >= 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"optimizer", c.optimizer.kind == nn::OptimizerKind::adam ? "adam" : "sgd"},
          {"learning_rate", c.optimizer.learning_rate},
          {"beta1", c.optimizer.beta1},
          {"beta2", c.optimizer.beta2},
          {"epsilon", c.optimizer.epsilon},
          {"validation_fraction", c.validation_fraction},
          {"patience", c.patience},
          {"seed", c.seed},
          {"threads", c.threads}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  read("epochs", c.epochs);
  read("batch_size", c.batch_size);
  if (j.contains("optimizer")) {
    const auto kind = j["optimizer"].get<std::string>();
    if (kind == "adam") c.optimizer.kind = nn::OptimizerKind::adam;
    else if (kind == "sgd") c.optimizer.kind = nn::OptimizerKind::sgd;
    else throw ConfigError("unknown optimizer '" + kind + "'");
  }
  read("learning_rate", c.optimizer.learning_rate);
  read("beta1", c.optimizer.beta1);
  read("beta2", c.optimizer.beta2);
  read("epsilon", c.optimizer.epsilon);
  read("validation_fraction", c.validation_fraction);
  read("patience", c.patience);
  read("seed", c.seed);
  read("threads", c.threads);
  return c;
}

nlohmann::json to_json(const History& h) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : h.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"validation_macro_f1", e.validation_macro_f1
                                                  ? nlohmann::json(*e.validation_macro_f1)
                                                  : nlohmann::json(nullptr)}});
  }
  return {{"epochs", epochs}, {"restored_epoch", h.restored_epoch}, {"stopped_early", h.stopped_early}};
}

History history_from_json(const nlohmann::json& j) {
  History h;
  for (const auto& e : j.at("epochs")) {
    EpochRecord r;
    r.epoch = e.at("epoch").get<std::size_t>();
    r.train_loss = e.at("train_loss").get<double>();
    if (!e.at("validation_macro_f1").is_null()) {
      r.validation_macro_f1 = e.at("validation_macro_f1").get<double>();
    }
    h.epochs.push_back(r);
  }
  h.restored_epoch = j.value("restored_epoch", std::size_t{0});
  h.stopped_early = j.value("stopped_early", false);
  return h;
}

namespace {

double batch_gradients(const Network& net, std::span<const ModelInput* const> batch,
                       std::span<const std::size_t> targets, std::span<const std::uint64_t> seeds,
                       std::vector<std::unique_ptr<Network>>& workers) {
  const std::size_t n_workers = std::min(workers.size(), batch.size());
  for (auto& w : workers) w->zero();
  if (n_workers <= 1) {
    return net.accumulate_gradients(batch, targets, seeds, *workers[0]);
  }
  std::vector<double> losses(n_workers, 0.0);
  std::vector<std::exception_ptr> errors(n_workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (batch.size() + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t begin = std::min(batch.size(), w * chunk);
    const std::size_t end = std::min(batch.size(), begin + chunk);
    threads.emplace_back([&, w, begin, end] {
      try {
        losses[w] = net.accumulate_gradients(batch.subspan(begin, end - begin),
                                             targets.subspan(begin, end - begin),
                                             seeds.subspan(begin, end - begin), *workers[w]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  // Fixed reduction order: worker 0 accumulates 1, 2, ...
  auto total = workers[0]->parameters();
  for (std::size_t w = 1; w < n_workers; ++w) {
    auto part = workers[w]->parameters();
    for (std::size_t p = 0; p < total.size(); ++p) *total[p].tensor += *part[p].tensor;
  }
  double loss = 0.0;
  for (double l : losses) loss += l;
  return loss;
}

double validation_f1(const Network& net, std::span<const ModelInput> inputs,
                     std::span<const std::size_t> labels, const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> truth;
  std::vector<std::size_t> pred;
  for (std::size_t i : idx) {
    truth.push_back(labels[i]);
    pred.push_back(predict(net, inputs[i]));
  }
  return eval::macro_f1(truth, pred, net.spec().num_classes);
}

}  // namespace

History train(Network& net, std::span<const ModelInput> inputs,
              std::span<const std::size_t> labels, const TrainConfig& config,
              const EpochCallback& on_epoch) {
  config.validate();
  if (inputs.size() != labels.size()) throw DataError("train: inputs and labels differ in length");
  for (std::size_t y : labels) {
    if (y >= net.spec().num_classes) throw DataError("train: label outside the model's classes");
  }

  std::vector<std::size_t> fit_idx(inputs.size());
  std::iota(fit_idx.begin(), fit_idx.end(), std::size_t{0});
  std::vector<std::size_t> val_idx;
  if (config.validation_fraction > 0.0 && !inputs.empty()) {
    try {
      auto split = corpus::stratified_indices(labels, config.validation_fraction,
                                              mix_seed(config.seed, 0x7661));
      fit_idx = std::move(split.first);
      val_idx = std::move(split.second);
    } catch (const DataError&) {
      // a class too small to hold out: train on everything, no validation
    }
  }

  History history;
  if (config.epochs == 0 || fit_idx.empty()) return history;

  nn::Optimizer optimizer(config.optimizer);
  std::vector<std::unique_ptr<Network>> workers;
  for (std::size_t w = 0; w < config.threads; ++w) workers.push_back(net.zeros_like());
  auto params = net.parameters();
  std::vector<const nn::Tensor*> grad_ptrs;
  for (const auto& g : workers[0]->parameters()) grad_ptrs.push_back(g.tensor);

  const bool early_stopping = !val_idx.empty() && config.patience > 0;
  std::unique_ptr<Network> best;
  double best_f1 = -1.0;
  std::size_t since_best = 0;

  Rng shuffle_rng(mix_seed(config.seed, 0x5348));
  std::vector<std::size_t> order = fit_idx;
  std::uint64_t sample_counter = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const ModelInput*> batch;
      std::vector<std::size_t> targets;
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&inputs[order[i]]);
        targets.push_back(labels[order[i]]);
        seeds.push_back(mix_seed(config.seed, ++sample_counter));
      }
      const double loss = batch_gradients(net, batch, targets, seeds, workers);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_no));
      }
      loss_sum += loss;
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (auto& g : workers[0]->parameters()) *g.tensor *= scale;
      try {
        optimizer.step(params, grad_ptrs);
      } catch (const std::domain_error& e) {
        throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_no));
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(order.size());
    if (!val_idx.empty()) record.validation_macro_f1 = validation_f1(net, inputs, labels, val_idx);
    history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);

    if (early_stopping) {
      if (*record.validation_macro_f1 > best_f1) {
        best_f1 = *record.validation_macro_f1;
        best = net.clone();
        history.restored_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        history.stopped_early = epoch < config.epochs;
        break;
      }
    }
  }
  if (early_stopping && best) {
    net.assign(*best);
  } else {
    history.restored_epoch = history.epochs.size();
  }
  return history;
}

}  // namespace railcause::models
