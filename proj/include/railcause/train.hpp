#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "railcause/models.hpp"
#include "railcause/nn/optim.hpp"

namespace railcause::models {

struct TrainConfig {
  std::size_t epochs = 15;
  std::size_t batch_size = 64;
  nn::OptimizerConfig optimizer{};
  /// Share of the training examples held out (stratified) for validation
  /// macro-F1; 0 disables validation and early stopping.
  double validation_fraction = 0.1;
  /// Epochs without validation improvement before stopping; 0 disables.
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  /// Per-sample gradient workers. Results are bit-identical across runs
  /// with the same worker count.
  std::size_t threads = 1;

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> validation_macro_f1;
};

struct History {
  std::vector<EpochRecord> epochs;
  /// Epoch whose parameters were kept (0 = initialization / last epoch when
  /// early stopping is off).
  std::size_t restored_epoch = 0;
  bool stopped_early = false;
};

nlohmann::json to_json(const History& history);
History history_from_json(const nlohmann::json& j);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Shuffled minibatch training of cross-entropy loss. The batch gradient is
/// the mean over its samples. With validation enabled and patience > 0 the
/// parameters from the best validation macro-F1 epoch are restored.
/// Throws TrainingError on a non-finite loss or gradient, naming the epoch and
/// batch.
History train(Network& net, std::span<const ModelInput> inputs,
              std::span<const std::size_t> labels, const TrainConfig& config,
              const EpochCallback& on_epoch = {});

}  // namespace railcause::models
