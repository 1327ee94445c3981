#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "railcause/nn/optim.hpp"
#include "railcause/nn/tensor.hpp"
#include "railcause/text.hpp"
#include "railcause/vectorize.hpp"

/// The three neural architectures (tf-idf DNN, embedding CNN, embedding GRU
/// RNN), their initialization, and per-sample forward/backward passes.
namespace railcause::models {

enum class Architecture { dnn, cnn, rnn };

std::string_view name(Architecture a);
Architecture parse_architecture(std::string_view text);

/// Layer sizes. Defaults are the full-size networks: five
/// 1000-unit ReLU layers for the DNN; three conv(k=5) / maxpool(5) blocks
/// with a 32-unit head for the CNN; two 64-unit GRU layers with a 128-unit
/// head for the RNN; 500-token inputs with 100-dimensional embeddings.
struct ModelSpec {
  Architecture architecture = Architecture::dnn;
  std::size_t num_classes = 5;

  std::size_t input_dim = 0;  // DNN: tf-idf dimension
  std::size_t hidden_layers = 5;
  std::size_t hidden_units = 1000;

  std::size_t vocab_size = 0;  // CNN/RNN: embedding rows
  std::size_t sequence_length = text::kDefaultCapacity;
  std::size_t embedding_dim = 100;
  bool embedding_trainable = false;

  std::size_t conv_layers = 3;
  std::size_t conv_filters = 128;
  std::size_t kernel_size = 5;
  std::size_t pool_size = 5;
  std::size_t cnn_dense_units = 32;

  std::size_t gru_layers = 2;
  std::size_t gru_units = 64;
  std::size_t rnn_dense_units = 128;

  double dropout = 0.2;

  /// Throws ConfigError on an inconsistent spec.
  void validate() const;

  bool operator==(const ModelSpec&) const = default;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

/// Sequence lengths through the CNN: input, then after each conv and pool.
/// Throws ConfigError when a stage would be shorter than its window.
std::vector<std::size_t> cnn_lengths(const ModelSpec& spec);

/// One preprocessed example. The DNN reads `features`; CNN/RNN read
/// `sequence`.
struct ModelInput {
  vectorize::SparseVector features;
  text::TokenSequence sequence;
};

class Network {
 public:
  virtual ~Network() = default;

  const ModelSpec& spec() const { return spec_; }

  virtual std::unique_ptr<Network> clone() const = 0;

  /// Every parameter in a fixed order. Calling this on a clone yields
  /// tensors aligned with the original.
  virtual std::vector<nn::ParamRef> parameters() = 0;
  std::vector<nn::ParamRef> parameters() const;

  std::size_t parameter_count() const;
  std::size_t trainable_parameter_count() const;

  /// Copy with all tensors zeroed; used as a gradient buffer.
  std::unique_ptr<Network> zeros_like() const;
  void zero();

  /// Copies parameter values from a network of identical layout.
  void assign(const Network& other);

  /// Inference-mode logits (dropout disabled).
  virtual nn::Tensor logits(const ModelInput& input) const = 0;

  /// Train-mode forward and backward for a batch. Dropout masks for sample
  /// i come from `dropout_seeds[i]` alone. Parameter gradients of the summed
  /// loss are added to `grads` (a zeros_like() of this network). Returns the
  /// summed cross-entropy loss.
  virtual double accumulate_gradients(std::span<const ModelInput* const> batch,
                                      std::span<const std::size_t> targets,
                                      std::span<const std::uint64_t> dropout_seeds,
                                      Network& grads) const = 0;

 protected:
  explicit Network(ModelSpec spec) : spec_(std::move(spec)) {}
  ModelSpec spec_;
};

/// Deterministic initialization: dense and conv weights uniform in
/// +-sqrt(6 / fan_in), GRU weights uniform in +-1/sqrt(units), biases zero.
/// CNN/RNN copy `embedding` (vocab_size x embedding_dim) when given, else
/// draw it uniformly in +-0.5/embedding_dim; PAD and UNK rows are zeroed.
std::unique_ptr<Network> build(const ModelSpec& spec, std::uint64_t seed,
                               const nn::Tensor* embedding = nullptr);

/// softmax(logits(input)).
std::vector<double> predict_proba(const Network& net, const ModelInput& input);

/// Argmax of predict_proba, lowest index on ties.
std::size_t predict(const Network& net, const ModelInput& input);

}  // namespace railcause::models
