#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "railcause/app.hpp"
#include "railcause/errors.hpp"
#include "railcause/io.hpp"

namespace fs = std::filesystem;
using namespace railcause;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme;
  std::optional<std::string> embedding;
  std::optional<std::string> model;
  std::optional<std::size_t> threads;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "override the configured seed");
  cmd->add_option("--scheme", o.scheme, "label scheme: general|specific");
  cmd->add_option("--embedding", o.embedding, "features: word2vec|glove|tfidf");
  cmd->add_option("--model", o.model, "classifier: dnn|cnn|rnn|nbc|svm");
  cmd->add_option("--threads", o.threads, "gradient worker threads");
}

app::RunConfig resolve(const Overrides& o) {
  auto c = app::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.scheme) c.scheme = corpus::parse_scheme(*o.scheme);
  if (o.embedding) c.embedding.kind = models::parse_feature_kind(*o.embedding);
  if (o.model) c.model = models::parse_model_kind(*o.model);
  if (o.threads) c.train.threads = *o.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Classify railroad accident narratives into cause codes."};
  cli.require_subcommand(1);

  Overrides prep_o, train_o, eval_o;
  auto* prepare = cli.add_subcommand("prepare", "ingest CSVs, label, split, write datasets");
  add_run_flags(prepare, prep_o);

  auto* train = cli.add_subcommand("train", "train the configured features x model pair");
  add_run_flags(train, train_o);

  auto* evaluate = cli.add_subcommand("evaluate", "score a model on the prepared test set");
  add_run_flags(evaluate, eval_o);
  std::string eval_model_file;
  evaluate->add_option("--model-file", eval_model_file,
                       "model.json (default: the configured model directory)");

  auto* predict = cli.add_subcommand("predict", "rank causes for a narrative");
  std::string model_file, text, text_file;
  std::size_t top = 3;
  bool predict_json = false;
  predict->add_option("--model-file", model_file, "model.json")->required();
  auto* text_opt = predict->add_option("--text", text, "narrative text");
  auto* file_opt = predict->add_option("--file", text_file, "file holding the narrative");
  text_opt->excludes(file_opt);
  predict->add_option("--top,-n", top, "number of causes to list")->capture_default_str();
  predict->add_flag("--json", predict_json, "machine-readable output");

  auto* inspect = cli.add_subcommand("inspect", "nearest neighbours in a vector file");
  std::string embedding_file, word;
  std::size_t k = 10;
  bool inspect_json = false;
  inspect->add_option("--embedding-file", embedding_file, "word vector file")->required();
  inspect->add_option("--word", word, "query word")->required();
  inspect->add_option("-k", k, "neighbours to list")->capture_default_str();
  inspect->add_flag("--json", inspect_json, "machine-readable output");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  return app::run_guarded(
      [&] {
        if (*prepare) {
          app::cmd_prepare(resolve(prep_o), std::cerr);
        } else if (*train) {
          app::cmd_train(resolve(train_o), std::cerr);
        } else if (*evaluate) {
          const auto config = resolve(eval_o);
          const fs::path file = eval_model_file.empty()
                                    ? config.resolved_model_dir() / "model.json"
                                    : fs::path(eval_model_file);
          app::cmd_evaluate(config, file, std::cout);
        } else if (*predict) {
          const std::string narrative = text_file.empty() ? text : io::read_file(text_file);
          app::cmd_predict(model_file, narrative, top, predict_json, std::cout);
        } else if (*inspect) {
          app::cmd_inspect(embedding_file, word, k, inspect_json, std::cout);
        }
      },
      std::cerr);
}
