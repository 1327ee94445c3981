#include "railcause/models.hpp"

#include <cmath>
#include <stdexcept>

#include "railcause/errors.hpp"
#include "railcause/nn/gru.hpp"
#include "railcause/nn/ops.hpp"
#include "railcause/rng.hpp"

namespace railcause::models {

using nn::Mode;
using nn::ParamRef;
using nn::Tensor;

std::string_view name(Architecture a) {
  switch (a) {
    case Architecture::dnn: return "dnn";
    case Architecture::cnn: return "cnn";
    case Architecture::rnn: return "rnn";
  }
  return "?";
}

Architecture parse_architecture(std::string_view text) {
  if (text == "dnn") return Architecture::dnn;
  if (text == "cnn") return Architecture::cnn;
  if (text == "rnn") return Architecture::rnn;
  throw ConfigError("unknown architecture '" + std::string(text) + "'");
}

void ModelSpec::validate() const {
  if (num_classes < 2) throw ConfigError("model spec: at least two classes are required");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model spec: dropout must be in [0, 1)");
  switch (architecture) {
    case Architecture::dnn:
      if (input_dim == 0) throw ConfigError("model spec: DNN input_dim must be > 0");
      if (hidden_layers == 0 || hidden_units == 0) {
        throw ConfigError("model spec: DNN needs at least one non-empty hidden layer");
      }
      break;
    case Architecture::cnn:
    case Architecture::rnn:
      if (vocab_size < 2 || embedding_dim == 0 || sequence_length == 0) {
        throw ConfigError("model spec: sequence models need vocab_size >= 2, embedding_dim and "
                          "sequence_length > 0");
      }
      if (architecture == Architecture::cnn) {
        if (conv_layers == 0 || conv_filters == 0 || kernel_size == 0 || pool_size == 0 ||
            cnn_dense_units == 0) {
          throw ConfigError("model spec: CNN sizes must be > 0");
        }
        cnn_lengths(*this);
      } else if (gru_layers == 0 || gru_units == 0 || rnn_dense_units == 0) {
        throw ConfigError("model spec: RNN sizes must be > 0");
      }
      break;
  }
}

nlohmann::json to_json(const ModelSpec& s) {
  return {{"architecture", name(s.architecture)},
          {"num_classes", s.num_classes},
          {"input_dim", s.input_dim},
          {"hidden_layers", s.hidden_layers},
          {"hidden_units", s.hidden_units},
          {"vocab_size", s.vocab_size},
          {"sequence_length", s.sequence_length},
          {"embedding_dim", s.embedding_dim},
          {"embedding_trainable", s.embedding_trainable},
          {"conv_layers", s.conv_layers},
          {"conv_filters", s.conv_filters},
          {"kernel_size", s.kernel_size},
          {"pool_size", s.pool_size},
          {"cnn_dense_units", s.cnn_dense_units},
          {"gru_layers", s.gru_layers},
          {"gru_units", s.gru_units},
          {"rnn_dense_units", s.rnn_dense_units},
          {"dropout", s.dropout}};
}

ModelSpec spec_from_json(const nlohmann::json& j) {
  ModelSpec s;
  if (j.contains("architecture")) s.architecture = parse_architecture(j["architecture"].get<std::string>());
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
  };
  read("num_classes", s.num_classes);
  read("input_dim", s.input_dim);
  read("hidden_layers", s.hidden_layers);
  read("hidden_units", s.hidden_units);
  read("vocab_size", s.vocab_size);
  read("sequence_length", s.sequence_length);
  read("embedding_dim", s.embedding_dim);
  read("embedding_trainable", s.embedding_trainable);
  read("conv_layers", s.conv_layers);
  read("conv_filters", s.conv_filters);
  read("kernel_size", s.kernel_size);
  read("pool_size", s.pool_size);
  read("cnn_dense_units", s.cnn_dense_units);
  read("gru_layers", s.gru_layers);
  read("gru_units", s.gru_units);
  read("rnn_dense_units", s.rnn_dense_units);
  read("dropout", s.dropout);
  return s;
}

std::vector<std::size_t> cnn_lengths(const ModelSpec& spec) {
  std::vector<std::size_t> lengths{spec.sequence_length};
  std::size_t len = spec.sequence_length;
  for (std::size_t l = 0; l < spec.conv_layers; ++l) {
    if (len < spec.kernel_size) {
      throw ConfigError("model spec: CNN stage " + std::to_string(l) + " input length " +
                        std::to_string(len) + " is shorter than kernel size " +
                        std::to_string(spec.kernel_size));
    }
    len = len - spec.kernel_size + 1;
    lengths.push_back(len);
    if (len < spec.pool_size) {
      throw ConfigError("model spec: CNN stage " + std::to_string(l) + " conv output length " +
                        std::to_string(len) + " is shorter than pool size " +
                        std::to_string(spec.pool_size));
    }
    len = (len - spec.pool_size) / spec.pool_size + 1;
    lengths.push_back(len);
  }
  return lengths;
}

std::vector<ParamRef> Network::parameters() const {
  return const_cast<Network*>(this)->parameters();
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.tensor->size();
  return n;
}

std::size_t Network::trainable_parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) {
    if (p.trainable) n += p.tensor->size();
  }
  return n;
}

std::unique_ptr<Network> Network::zeros_like() const {
  auto copy = clone();
  copy->zero();
  return copy;
}

void Network::zero() {
  for (auto& p : parameters()) p.tensor->fill(0.0);
}

void Network::assign(const Network& other) {
  auto mine = parameters();
  auto theirs = other.parameters();
  if (mine.size() != theirs.size()) throw std::invalid_argument("assign: layout mismatch");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    nn::require_shape(*theirs[i].tensor, mine[i].tensor->shape(), mine[i].name.c_str());
    *mine[i].tensor = *theirs[i].tensor;
  }
}

namespace {

struct DenseLayer {
  Tensor weight;
  Tensor bias;
};

void init_uniform(Tensor& t, double limit, Rng& rng) {
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

DenseLayer make_dense(std::size_t in, std::size_t out, Rng& rng) {
  DenseLayer d{Tensor({in, out}), Tensor({out})};
  init_uniform(d.weight, std::sqrt(6.0 / static_cast<double>(in)), rng);
  return d;
}

void add_dense(std::vector<ParamRef>& refs, const std::string& prefix, DenseLayer& d) {
  refs.push_back({prefix + ".weight", &d.weight, true});
  refs.push_back({prefix + ".bias", &d.bias, true});
}

void accumulate(DenseLayer& target, const nn::DenseGrads& g) {
  target.weight += g.weights;
  target.bias += g.bias;
}

Tensor make_embedding(const ModelSpec& spec, const Tensor* source, Rng& rng) {
  Tensor e({spec.vocab_size, spec.embedding_dim});
  if (source) {
    nn::require_shape(*source, e.shape(), "embedding matrix");
    e = *source;
  } else {
    init_uniform(e, 0.5 / static_cast<double>(spec.embedding_dim), rng);
  }
  for (std::size_t r = 0; r < 2 && r < spec.vocab_size; ++r) {
    for (double& v : e.row(r)) v = 0.0;
  }
  return e;
}

Tensor lookup(const Tensor& embedding, const text::TokenSequence& seq, std::size_t rows) {
  const std::size_t dim = embedding.dim(1);
  Tensor x({rows, dim});
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t idx = seq.indices[i];
    if (idx >= embedding.dim(0)) throw std::out_of_range("token index outside embedding rows");
    const auto src = embedding.row(idx);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  return x;
}

void scatter_embedding(Tensor& grad, const text::TokenSequence& seq, const Tensor& dx) {
  for (std::size_t i = 0; i < dx.dim(0); ++i) {
    const std::size_t idx = seq.indices[i];
    if (idx <= text::kUnk) continue;  // PAD and UNK stay zero
    auto dst = grad.row(idx);
    const auto src = dx.row(i);
    for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += src[d];
  }
}

double loss_and_grad(const Tensor& logits, std::size_t target, Tensor& dlogits) {
  const Tensor probs = nn::softmax(logits);
  dlogits = nn::softmax_cross_entropy_backward(probs, target);
  return nn::cross_entropy(probs, target);
}

// ---------------------------------------------------------------- DNN

class Dnn final : public Network {
 public:
  Dnn(const ModelSpec& spec, Rng& rng) : Network(spec) {
    std::size_t in = spec.input_dim;
    for (std::size_t l = 0; l < spec.hidden_layers; ++l) {
      hidden_.push_back(make_dense(in, spec.hidden_units, rng));
      in = spec.hidden_units;
    }
    output_ = make_dense(in, spec.num_classes, rng);
  }

  std::unique_ptr<Network> clone() const override { return std::make_unique<Dnn>(*this); }

  std::vector<ParamRef> parameters() override {
    std::vector<ParamRef> refs;
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
      add_dense(refs, "dense" + std::to_string(l), hidden_[l]);
    }
    add_dense(refs, "output", output_);
    return refs;
  }

  Tensor logits(const ModelInput& input) const override {
    const ModelInput* batch[] = {&input};
    Forward f = forward(batch, {}, Mode::infer);
    return f.logits.reshaped({spec_.num_classes});
  }

  double accumulate_gradients(std::span<const ModelInput* const> batch,
                              std::span<const std::size_t> targets,
                              std::span<const std::uint64_t> seeds,
                              Network& grads_base) const override {
    auto& grads = static_cast<Dnn&>(grads_base);
    Forward f = forward(batch, seeds, Mode::train);
    const std::size_t b = batch.size();
    const std::size_t k = spec_.num_classes;
    Tensor dlogits({b, k});
    double loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      Tensor row({k});
      std::copy(f.logits.row(i).begin(), f.logits.row(i).end(), row.values().begin());
      Tensor d;
      loss += loss_and_grad(row, targets[i], d);
      std::copy(d.values().begin(), d.values().end(), dlogits.row(i).begin());
    }
    auto g = nn::dense_backward(f.dropped.back(), output_.weight, dlogits);
    accumulate(grads.output_, g);
    Tensor upstream = std::move(g.input);
    for (std::size_t l = hidden_.size(); l-- > 0;) {
      Tensor da = nn::relu_backward(f.pre[l], nn::apply_mask(upstream, f.masks[l]));
      if (l == 0) {
        // Sparse first layer: only rows of active features receive gradient.
        grads.hidden_[0].bias += column_sum(da);
        for (std::size_t i = 0; i < b; ++i) {
          const auto drow = da.row(i);
          for (const auto& e : batch[i]->features) {
            auto wrow = grads.hidden_[0].weight.row(e.index);
            for (std::size_t u = 0; u < wrow.size(); ++u) wrow[u] += e.value * drow[u];
          }
        }
      } else {
        auto gl = nn::dense_backward(f.dropped[l - 1], hidden_[l].weight, da);
        accumulate(grads.hidden_[l], gl);
        upstream = std::move(gl.input);
      }
    }
    return loss;
  }

 private:
  struct Forward {
    std::vector<Tensor> pre;      // pre-activation per hidden layer
    std::vector<Tensor> masks;    // dropout multipliers
    std::vector<Tensor> dropped;  // layer outputs after dropout
    Tensor logits;
  };

  static Tensor column_sum(const Tensor& m) {
    Tensor s({m.dim(1)});
    for (std::size_t r = 0; r < m.dim(0); ++r) {
      for (std::size_t c = 0; c < m.dim(1); ++c) s[c] += m.at(r, c);
    }
    return s;
  }

  Forward forward(std::span<const ModelInput* const> batch, std::span<const std::uint64_t> seeds,
                  Mode mode) const {
    const std::size_t b = batch.size();
    const std::size_t units = spec_.hidden_units;
    std::vector<Rng> rngs;
    for (std::size_t i = 0; i < b; ++i) rngs.emplace_back(mode == Mode::train ? seeds[i] : 0);

    Forward f;
    Tensor first({b, units});
    for (std::size_t i = 0; i < b; ++i) {
      auto out = first.row(i);
      const auto bias = hidden_[0].bias.values();
      std::copy(bias.begin(), bias.end(), out.begin());
      for (const auto& e : batch[i]->features) {
        if (e.index >= spec_.input_dim) throw std::out_of_range("DNN: feature index outside input_dim");
        const auto wrow = hidden_[0].weight.row(e.index);
        for (std::size_t u = 0; u < units; ++u) out[u] += e.value * wrow[u];
      }
    }
    Tensor pre = std::move(first);
    for (std::size_t l = 0; l < hidden_.size(); ++l) {
      if (l > 0) pre = nn::dense(f.dropped.back(), hidden_[l].weight, hidden_[l].bias);
      Tensor act = nn::relu(pre);
      Tensor mask({b, units}, 1.0);
      if (mode == Mode::train && spec_.dropout > 0.0) {
        for (std::size_t i = 0; i < b; ++i) {
          Tensor row_mask;
          Tensor row({units});
          nn::dropout(row, spec_.dropout, Mode::train, rngs[i], &row_mask);
          std::copy(row_mask.values().begin(), row_mask.values().end(), mask.row(i).begin());
        }
        act = nn::apply_mask(act, mask);
      }
      f.pre.push_back(std::move(pre));
      f.masks.push_back(std::move(mask));
      f.dropped.push_back(std::move(act));
    }
    f.logits = nn::dense(f.dropped.back(), output_.weight, output_.bias);
    return f;
  }

  std::vector<DenseLayer> hidden_;
  DenseLayer output_;
};

// ---------------------------------------------------------------- CNN

class Cnn final : public Network {
 public:
  Cnn(const ModelSpec& spec, Rng& rng, const Tensor* embedding) : Network(spec) {
    embedding_ = make_embedding(spec, embedding, rng);
    const auto lengths = cnn_lengths(spec);
    std::size_t depth = spec.embedding_dim;
    for (std::size_t l = 0; l < spec.conv_layers; ++l) {
      ConvLayer c{Tensor({spec.conv_filters, spec.kernel_size, depth}), Tensor({spec.conv_filters})};
      init_uniform(c.kernel, std::sqrt(6.0 / static_cast<double>(spec.kernel_size * depth)), rng);
      conv_.push_back(std::move(c));
      depth = spec.conv_filters;
    }
    flat_ = lengths.back() * spec.conv_filters;
    dense_ = make_dense(flat_, spec.cnn_dense_units, rng);
    output_ = make_dense(spec.cnn_dense_units, spec.num_classes, rng);
  }

  std::unique_ptr<Network> clone() const override { return std::make_unique<Cnn>(*this); }

  std::vector<ParamRef> parameters() override {
    std::vector<ParamRef> refs;
    refs.push_back({"embedding", &embedding_, spec_.embedding_trainable});
    for (std::size_t l = 0; l < conv_.size(); ++l) {
      refs.push_back({"conv" + std::to_string(l) + ".kernel", &conv_[l].kernel, true});
      refs.push_back({"conv" + std::to_string(l) + ".bias", &conv_[l].bias, true});
    }
    add_dense(refs, "dense", dense_);
    add_dense(refs, "output", output_);
    return refs;
  }

  Tensor logits(const ModelInput& input) const override {
    Rng rng(0);
    return forward(input.sequence, Mode::infer, rng).logits;
  }

  double accumulate_gradients(std::span<const ModelInput* const> batch,
                              std::span<const std::size_t> targets,
                              std::span<const std::uint64_t> seeds,
                              Network& grads_base) const override {
    auto& grads = static_cast<Cnn&>(grads_base);
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Rng rng(seeds[i]);
      const auto& seq = batch[i]->sequence;
      Forward f = forward(seq, Mode::train, rng);
      Tensor dlogits;
      loss += loss_and_grad(f.logits, targets[i], dlogits);

      auto go = nn::dense_backward(f.head_dropped, output_.weight, dlogits);
      accumulate(grads.output_, go);
      Tensor dh = nn::relu_backward(f.head_pre, nn::apply_mask(go.input, f.head_mask));
      auto gd = nn::dense_backward(f.flat, dense_.weight, dh);
      accumulate(grads.dense_, gd);
      Tensor upstream = gd.input.reshaped(f.stages.back().dropped.shape());
      for (std::size_t l = conv_.size(); l-- > 0;) {
        const Stage& s = f.stages[l];
        Tensor dpool = nn::apply_mask(upstream, s.mask);
        Tensor dact = nn::maxpool1d_backward(s.conv_out.shape(), s.pool.argmax, dpool);
        Tensor dconv = nn::relu_backward(s.conv_out, dact);
        auto gc = nn::conv1d_backward(s.input, conv_[l].kernel, dconv);
        grads.conv_[l].kernel += gc.kernels;
        grads.conv_[l].bias += gc.bias;
        upstream = std::move(gc.input);
      }
      if (spec_.embedding_trainable) scatter_embedding(grads.embedding_, seq, upstream);
    }
    return loss;
  }

 private:
  struct ConvLayer {
    Tensor kernel;
    Tensor bias;
  };
  struct Stage {
    Tensor input;
    Tensor conv_out;  // pre-activation
    nn::PoolResult pool;
    Tensor mask;
    Tensor dropped;
  };
  struct Forward {
    std::vector<Stage> stages;
    Tensor flat;
    Tensor head_pre;
    Tensor head_mask;
    Tensor head_dropped;
    Tensor logits;
  };

  Forward forward(const text::TokenSequence& seq, Mode mode, Rng& rng) const {
    if (seq.capacity() != spec_.sequence_length) {
      throw std::invalid_argument("CNN: sequence capacity " + std::to_string(seq.capacity()) +
                                  " differs from the model's " +
                                  std::to_string(spec_.sequence_length));
    }
    Forward f;
    Tensor x = lookup(embedding_, seq, seq.capacity());
    for (std::size_t l = 0; l < conv_.size(); ++l) {
      Stage s;
      s.input = std::move(x);
      s.conv_out = nn::conv1d(s.input, conv_[l].kernel, conv_[l].bias);
      s.pool = nn::maxpool1d(nn::relu(s.conv_out), spec_.pool_size, spec_.pool_size);
      s.dropped = nn::dropout(s.pool.output, spec_.dropout, mode, rng, &s.mask);
      x = s.dropped;
      f.stages.push_back(std::move(s));
    }
    f.flat = x.reshaped({x.size()});
    f.head_pre = nn::dense(f.flat, dense_.weight, dense_.bias);
    f.head_dropped = nn::dropout(nn::relu(f.head_pre), spec_.dropout, mode, rng, &f.head_mask);
    f.logits = nn::dense(f.head_dropped, output_.weight, output_.bias);
    return f;
  }

  Tensor embedding_;
  std::vector<ConvLayer> conv_;
  std::size_t flat_ = 0;
  DenseLayer dense_;
  DenseLayer output_;
};

// ---------------------------------------------------------------- RNN

class Rnn final : public Network {
 public:
  Rnn(const ModelSpec& spec, Rng& rng, const Tensor* embedding) : Network(spec) {
    embedding_ = make_embedding(spec, embedding, rng);
    std::size_t in = spec.embedding_dim;
    const double limit = 1.0 / std::sqrt(static_cast<double>(spec.gru_units));
    for (std::size_t l = 0; l < spec.gru_layers; ++l) {
      nn::GruParams g(in, spec.gru_units);
      g.for_each([&](const char* n, Tensor& t) {
        if (n[0] != 'b') init_uniform(t, limit, rng);
      });
      gru_.push_back(std::move(g));
      in = spec.gru_units;
    }
    dense_ = make_dense(spec.gru_units, spec.rnn_dense_units, rng);
    output_ = make_dense(spec.rnn_dense_units, spec.num_classes, rng);
  }

  std::unique_ptr<Network> clone() const override { return std::make_unique<Rnn>(*this); }

  std::vector<ParamRef> parameters() override {
    std::vector<ParamRef> refs;
    refs.push_back({"embedding", &embedding_, spec_.embedding_trainable});
    for (std::size_t l = 0; l < gru_.size(); ++l) {
      gru_[l].for_each([&](const char* n, Tensor& t) {
        refs.push_back({"gru" + std::to_string(l) + "." + n, &t, true});
      });
    }
    add_dense(refs, "dense", dense_);
    add_dense(refs, "output", output_);
    return refs;
  }

  Tensor logits(const ModelInput& input) const override {
    Rng rng(0);
    return forward(input.sequence, Mode::infer, rng).logits;
  }

  double accumulate_gradients(std::span<const ModelInput* const> batch,
                              std::span<const std::size_t> targets,
                              std::span<const std::uint64_t> seeds,
                              Network& grads_base) const override {
    auto& grads = static_cast<Rnn&>(grads_base);
    const std::size_t units = spec_.gru_units;
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Rng rng(seeds[i]);
      const auto& seq = batch[i]->sequence;
      Forward f = forward(seq, Mode::train, rng);
      Tensor dlogits;
      loss += loss_and_grad(f.logits, targets[i], dlogits);

      auto go = nn::dense_backward(f.head_dropped, output_.weight, dlogits);
      accumulate(grads.output_, go);
      Tensor dh = nn::relu_backward(f.head_pre, nn::apply_mask(go.input, f.head_mask));
      auto gd = nn::dense_backward(f.final_dropped, dense_.weight, dh);
      accumulate(grads.dense_, gd);
      Tensor dfinal = nn::apply_mask(gd.input, f.final_mask);

      const std::size_t steps = f.steps;
      if (steps == 0) continue;
      // Only the last hidden state of the top layer feeds the head.
      Tensor upstream({steps, units});
      std::copy(dfinal.values().begin(), dfinal.values().end(), upstream.row(steps - 1).begin());
      for (std::size_t l = gru_.size(); l-- > 0;) {
        auto gg = nn::gru_backward(f.caches[l], gru_[l], upstream, grads.gru_[l]);
        if (l > 0) {
          upstream = nn::apply_mask(gg.input, f.masks[l - 1]);
        } else if (spec_.embedding_trainable) {
          scatter_embedding(grads.embedding_, seq, gg.input);
        }
      }
    }
    return loss;
  }

 private:
  struct Forward {
    std::size_t steps = 0;
    std::vector<nn::GruCache> caches;
    std::vector<Tensor> masks;  // between stacked layers
    Tensor final_mask;
    Tensor final_dropped;
    Tensor head_pre;
    Tensor head_mask;
    Tensor head_dropped;
    Tensor logits;
  };

  // The recurrence runs over the true (unpadded) tokens; the head reads the
  // state after the last one (zeros for an empty narrative).
  Forward forward(const text::TokenSequence& seq, Mode mode, Rng& rng) const {
    Forward f;
    f.steps = std::min(seq.true_length, seq.capacity());
    Tensor x = lookup(embedding_, seq, f.steps);
    for (std::size_t l = 0; l < gru_.size(); ++l) {
      nn::GruCache cache;
      Tensor h = nn::gru_layer(x, gru_[l], nullptr, &cache);
      f.caches.push_back(std::move(cache));
      if (l + 1 < gru_.size()) {
        Tensor mask;
        x = nn::dropout(h, spec_.dropout, mode, rng, &mask);
        f.masks.push_back(std::move(mask));
      } else {
        x = std::move(h);
      }
    }
    Tensor final({spec_.gru_units});
    if (f.steps > 0) {
      const auto last = x.row(f.steps - 1);
      std::copy(last.begin(), last.end(), final.values().begin());
    }
    f.final_dropped = nn::dropout(final, spec_.dropout, mode, rng, &f.final_mask);
    f.head_pre = nn::dense(f.final_dropped, dense_.weight, dense_.bias);
    f.head_dropped = nn::dropout(nn::relu(f.head_pre), spec_.dropout, mode, rng, &f.head_mask);
    f.logits = nn::dense(f.head_dropped, output_.weight, output_.bias);
    return f;
  }

  Tensor embedding_;
  std::vector<nn::GruParams> gru_;
  DenseLayer dense_;
  DenseLayer output_;
};

}  // namespace

std::unique_ptr<Network> build(const ModelSpec& spec, std::uint64_t seed, const Tensor* embedding) {
  spec.validate();
  Rng rng(seed);
  switch (spec.architecture) {
    case Architecture::dnn: return std::make_unique<Dnn>(spec, rng);
    case Architecture::cnn: return std::make_unique<Cnn>(spec, rng, embedding);
    case Architecture::rnn: return std::make_unique<Rnn>(spec, rng, embedding);
  }
  throw ConfigError("unknown architecture");
}

std::vector<double> predict_proba(const Network& net, const ModelInput& input) {
  const Tensor p = nn::softmax(net.logits(input));
  return {p.values().begin(), p.values().end()};
}

std::size_t predict(const Network& net, const ModelInput& input) {
  const auto p = predict_proba(net, input);
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return best;
}

}  // namespace railcause::models
