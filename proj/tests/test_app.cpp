#include <stdexcept>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "railcause/app.hpp"
#include "railcause/csv.hpp"
#include "railcause/errors.hpp"
#include "railcause/io.hpp"
#include "runs.hpp"
#include "synthetic.hpp"

using namespace railcause;
using namespace railcause::app;
using models::FeatureKind;
using models::ModelKind;
namespace fs = std::filesystem;

namespace {

RunConfig prepared_run(const testing::TempDir& dir, FeatureKind f, ModelKind m, std::size_t n = 200) {
  auto c = testing::small_run(f, m, dir.path());
  const auto csv_path = dir.path() / "reports.csv";
  if (!fs::exists(csv_path)) testing::write_csv(csv_path, testing::keyword_corpus(n, 21));
  c.inputs = {csv_path};
  c.column_map.narratives = {"narrative1", "narrative2"};
  return c;
}

fs::path write_config(const RunConfig& c, const fs::path& path) {
  io::write_file_atomic(path, to_json(c).dump(2));
  return path;
}

std::vector<std::vector<std::string>> read_csv_file(const fs::path& path) {
  std::ifstream in(path);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  while (reader.next(row)) rows.push_back(row);
  return rows;
}

}  // namespace

TEST_SUITE("app") {
  TEST_CASE("config parsing resolves paths and rejects unknown keys") {
    const auto j = nlohmann::json::parse(R"({
      "inputs": ["a.csv", "/abs/b.csv"], "scheme": "specific", "model": "cnn",
      "embedding": {"kind": "glove", "path": "vec.txt", "word2vec": {"dim": 50, "mode": "skipgram"}},
      "train": {"epochs": 4}, "baseline": {"alpha": 0.5}, "output_dir": "runs", "seed": 9
    })");
    const auto c = config_from_json(j, "/base");
    CHECK(c.inputs == std::vector<fs::path>{"/base/a.csv", "/abs/b.csv"});
    CHECK(c.scheme == corpus::LabelScheme::specific);
    CHECK(c.model == ModelKind::cnn);
    CHECK(c.embedding.kind == FeatureKind::glove);
    CHECK(c.embedding.path == fs::path("/base/vec.txt"));
    CHECK(c.embedding.word2vec.dim == 50);
    CHECK(c.embedding.word2vec.mode == embed::Word2VecMode::skip_gram);
    CHECK(c.train.epochs == 4);
    CHECK(c.baseline.alpha == 0.5);
    CHECK(c.output_dir == fs::path("/base/runs"));
    CHECK(c.resolved_model_dir() == fs::path("/base/runs/glove_cnn"));
    CHECK(c.seed == 9);

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"modle": "rnn"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"train": {"epoch": 3}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"model_spec": {"units": 3}})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scheme": "coarse"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"seed": "x"})")), ConfigError);

    const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
    CHECK(to_json(back).dump() == to_json(c).dump());
  }

  TEST_CASE("prepare writes the dataset files and the distribution") {
    testing::TempDir dir("app_prepare");
    const auto c = prepared_run(dir, FeatureKind::tfidf, ModelKind::nbc, 100);
    std::ostringstream log;
    const auto r = cmd_prepare(c, log);
    CHECK(r.report.accepted == 100);
    CHECK(r.train_size == 80);
    CHECK(r.test_size == 20);
    CHECK(r.distribution == std::vector<std::size_t>{20, 20, 20, 20, 20});
    CHECK(r.warnings.empty());
    for (const char* f : {"train.jsonl", "test.jsonl", "vocab.tsv", "distribution.csv", "ingest.json",
                          "dataset.json", "config.resolved.json"}) {
      CHECK(fs::exists(c.output_dir / f));
    }
    const auto rows = read_csv_file(c.output_dir / "distribution.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"label", "count", "share"});
    CHECK(rows[1][0] == "E");
    CHECK(rows[1][1] == "20");
    CHECK(std::stod(rows[1][2]) == doctest::Approx(0.2));
    const auto meta = nlohmann::json::parse(io::read_file(c.output_dir / "dataset.json"));
    CHECK(meta["scheme"] == "general");
    CHECK(meta["classes"].size() == 5);
    std::ifstream train(c.output_dir / "train.jsonl");
    CHECK(corpus::read_dataset(train).size() == 80);
    const auto resolved = load_config(c.output_dir / "config.resolved.json");
    CHECK(to_json(resolved).dump() == to_json(c).dump());
  }

  TEST_CASE("prepare on an empty input warns and writes zero rows") {
    testing::TempDir dir("app_empty");
    auto c = testing::small_run(FeatureKind::tfidf, ModelKind::nbc, dir.path());
    io::write_file_atomic(dir.path() / "empty.csv", "");
    c.inputs = {dir.path() / "empty.csv"};
    std::ostringstream log;
    const auto r = cmd_prepare(c, log);
    CHECK(r.report.rows_read == 0);
    CHECK(r.distribution.empty());
    CHECK(r.train_size == 0);
    CHECK(r.warnings.size() == 1);
    CHECK(log.str().find("warning") != std::string::npos);
    CHECK(read_csv_file(c.output_dir / "distribution.csv").size() == 1);
    std::ifstream test(c.output_dir / "test.jsonl");
    CHECK(corpus::read_dataset(test).empty());
  }

  TEST_CASE("specific scheme keeps only the eight categories") {
    testing::TempDir dir("app_specific");
    std::ofstream(dir.path() / "in.csv") << "id,year,cause,narrative\n"
                                         << "1,2001,H307,a\n2,2001,H306,b\n3,2001,H401,c\n"
                                         << "4,2001,T110,d\n5,2001,T110,e\n6,2001,H307,f\n";
    auto c = testing::small_run(FeatureKind::tfidf, ModelKind::nbc, dir.path());
    c.inputs = {dir.path() / "in.csv"};
    c.scheme = corpus::LabelScheme::specific;
    c.test_fraction = 0.4;
    std::ostringstream log;
    const auto r = cmd_prepare(c, log);
    REQUIRE(r.distribution.size() == 8);
    CHECK(r.distribution[0] == 3);
    CHECK(r.distribution[1] == 2);
  }

  TEST_CASE("train, evaluate and predict in process") {
    testing::TempDir dir("app_pipeline");
    auto c = prepared_run(dir, FeatureKind::tfidf, ModelKind::svm);
    c.baseline.epochs = 20;
    std::ostringstream log;
    cmd_prepare(c, log);
    const auto trained = cmd_train(c, log);
    const auto mdir = c.resolved_model_dir();
    CHECK(trained.model_path == mdir / "model.json");
    for (const char* f : {"model.json", "model.bin", "model.vocab.tsv", "history.csv",
                          "config.resolved.json"}) {
      CHECK(fs::exists(mdir / f));
    }

    std::ostringstream out;
    const auto ev = cmd_evaluate(c, trained.model_path, out);
    CHECK(ev.metrics.macro_f1 >= 0.95);
    CHECK(out.str().find("macro-F1") != std::string::npos);
    const auto m = nlohmann::json::parse(io::read_file(mdir / "metrics.json"));
    CHECK(m["macro_f1"].get<double>() == ev.metrics.macro_f1);
    CHECK(m["per_class"].size() == 5);
    CHECK(m["per_class"][0].contains("auc"));
    const auto cm = read_csv_file(mdir / "confusion.csv");
    CHECK(cm.size() == 6);
    for (const auto& row : cm) CHECK(row.size() == 6);
    for (const char* cls : {"E", "H", "M", "S", "T"}) {
      const auto roc = read_csv_file(mdir / (std::string("roc_") + cls + ".csv"));
      CHECK(roc.front() == std::vector<std::string>{"threshold", "fpr", "tpr"});
    }

    const auto model = models::load_model(trained.model_path);
    const auto docs = testing::keyword_corpus(10, 77);
    for (std::size_t top : {1, 3, 5, 9}) {
      const auto ranked = rank_causes(model, docs[0].narrative, top);
      CHECK(ranked.size() == std::min<std::size_t>(top, 5));
      double sum = 0.0;
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i) CHECK(ranked[i - 1].probability >= ranked[i].probability);
        sum += ranked[i].probability;
      }
      CHECK(sum <= 1.0 + 1e-12);
    }
    CHECK(rank_causes(model, "", 5).size() == 5);

    std::ostringstream js;
    cmd_predict(trained.model_path, docs[0].narrative, 2, true, js);
    const auto pj = nlohmann::json::parse(js.str());
    CHECK(pj["predictions"].size() == 2);
    CHECK(pj["predictions"][0]["cause"] == testing::general_code(docs[0].label).substr(0, 1));
    std::ostringstream table;
    cmd_predict(trained.model_path, "", 3, false, table);
    const std::string printed = table.str();
    CHECK(std::count(printed.begin(), printed.end(), '\n') == 4);
    CHECK_THROWS_AS(cmd_predict(trained.model_path, "x", 0, false, table), ConfigError);
  }

  TEST_CASE("scheme mismatch is a config error") {
    testing::TempDir dir("app_mismatch");
    auto c = prepared_run(dir, FeatureKind::tfidf, ModelKind::nbc);
    std::ostringstream log;
    cmd_prepare(c, log);
    const auto trained = cmd_train(c, log);
    auto other = c;
    other.scheme = corpus::LabelScheme::specific;
    CHECK_THROWS_AS(cmd_train(other, log), ConfigError);
    cmd_prepare(other, log);
    std::ostringstream out;
    CHECK_THROWS_AS(cmd_evaluate(other, trained.model_path, out), ConfigError);
  }

  TEST_CASE("inspect lists neighbours, clamps k and explains unknown words") {
    testing::TempDir dir("app_inspect");
    std::ofstream(dir.path() / "v.txt") << "inspection 1 0 0\ninvestigation 0.9 0.1 0\n"
                                        << "rail 0 1 0\ntrack 0 0.9 0.2\n";
    std::ostringstream out;
    const auto n = cmd_inspect(dir.path() / "v.txt", "inspection", 2, false, out);
    REQUIRE(n.size() == 2);
    CHECK(n[0].token == "investigation");
    CHECK(out.str().rfind("investigation\t", 0) == 0);
    CHECK(cmd_inspect(dir.path() / "v.txt", "inspection", 50, false, out).size() == 3);
    std::ostringstream js;
    cmd_inspect(dir.path() / "v.txt", "rail", 1, true, js);
    CHECK(nlohmann::json::parse(js.str())["neighbors"][0]["token"] == "track");
    try {
      cmd_inspect(dir.path() / "v.txt", "inspecton", 2, false, out);
      FAIL("expected a data error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("inspection") != std::string::npos);
    }
    CHECK_THROWS_AS(cmd_inspect(dir.path() / "missing.txt", "rail", 2, false, out), DataError);
  }

  TEST_CASE("run_guarded maps errors to exit codes") {
    std::ostringstream err;
    CHECK(run_guarded([] {}, err) == 0);
    CHECK(run_guarded([] { throw ConfigError("c"); }, err) == 2);
    CHECK(run_guarded([] { throw DataError("d"); }, err) == 3);
    CHECK(run_guarded([] { throw TrainingError("t"); }, err) == 4);
    CHECK(err.str().find("training failed: t") != std::string::npos);
  }

  TEST_CASE("command line end to end") {
    testing::TempDir dir("app_cli");
    const auto c = prepared_run(dir, FeatureKind::word2vec, ModelKind::rnn);
    const auto cfg = write_config(c, dir.path() / "run.json");
    const auto q = testing::quote(cfg);

    auto r = testing::run_cli("prepare --config " + q, dir.path());
    CHECK(r.code == 0);
    CHECK(r.err.find("rows read 200") != std::string::npos);

    r = testing::run_cli("train --config " + q, dir.path());
    REQUIRE(r.code == 0);
    const auto mdir = c.resolved_model_dir();
    CHECK(fs::exists(mdir / "embeddings.txt"));
    CHECK(read_csv_file(mdir / "history.csv").size() == 4);

    r = testing::run_cli("evaluate --config " + q, dir.path());
    CHECK(r.code == 0);
    CHECK(r.out.find("macro-F1") != std::string::npos);

    r = testing::run_cli("predict --model-file " + testing::quote(mdir / "model.json") +
                             " --text 'c1k0 c1k3 f4' --top 2 --json",
                         dir.path());
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["predictions"].size() == 2);

    io::write_file_atomic(dir.path() / "n.txt", "c2k1 f5 c2k2");
    r = testing::run_cli("predict --model-file " + testing::quote(mdir / "model.json") + " --file " +
                             testing::quote(dir.path() / "n.txt"),
                         dir.path());
    CHECK(r.code == 0);
    CHECK(r.out.rfind("rank", 0) == 0);

    r = testing::run_cli("inspect --embedding-file " + testing::quote(mdir / "embeddings.txt") +
                             " --word c0k1 -k 3 --json",
                         dir.path());
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["neighbors"].size() == 3);

    SUBCASE("failures exit with their codes") {
      CHECK(testing::run_cli("train --config " + q + " --embedding tfidf --model rnn", dir.path()).code == 2);
      CHECK(testing::run_cli("train --config " + q + " --scheme specific", dir.path()).code == 2);
      CHECK(testing::run_cli("prepare", dir.path()).code == 2);
      CHECK(testing::run_cli("frobnicate", dir.path()).code == 2);
      CHECK(testing::run_cli("prepare --config " + testing::quote(dir.path() / "none.json"), dir.path())
                .code == 2);
      CHECK(testing::run_cli("predict --model-file " + testing::quote(dir.path() / "none.json") +
                                 " --text x",
                             dir.path())
                .code == 3);
      const auto oov = testing::run_cli("inspect --embedding-file " +
                                            testing::quote(mdir / "embeddings.txt") + " --word c0k",
                                        dir.path());
      CHECK(oov.code == 3);
      CHECK(oov.err.find("closest") != std::string::npos);
    }
  }

  TEST_CASE("single-threaded reruns are byte-identical") {
    testing::TempDir dir("app_rerun");
    const auto c = prepared_run(dir, FeatureKind::word2vec, ModelKind::cnn);
    std::ostringstream log;
    cmd_prepare(c, log);
    const auto first = cmd_train(c, log);
    std::map<std::string, std::string> before;
    for (const auto& e : fs::directory_iterator(c.resolved_model_dir())) {
      before[e.path().filename().string()] = io::read_file(e.path());
    }
    cmd_train(c, log);
    for (const auto& [name, bytes] : before) {
      CAPTURE(name);
      CHECK(io::read_file(c.resolved_model_dir() / name) == bytes);
    }
    (void)first;
  }
}
