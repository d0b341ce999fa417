#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include "json.hpp"

#include "dcrnet/io_util.hpp"
#include "dcrnet/synthetic.hpp"
#include "support/tmp_dir.hpp"

using namespace dcrnet;

namespace {

struct CommandResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

CommandResult run_cli(const std::string& args) {
  const std::string command = std::string(DCRNET_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult result;
  char buffer[4096];
  while (std::size_t n = fread(buffer, 1, sizeof buffer, pipe)) {
    result.output.append(buffer, n);
  }
  const int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

bool file_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

}  // namespace

TEST_CASE("fixture generation and conversion reproduce the corpus shape") {
  testing::TmpDir dir("cli_convert");
  CommandResult fixture =
      run_cli("make-fixture --out " + dir.file("src"));
  CAPTURE(fixture.output);
  REQUIRE(fixture.status == 0);

  CommandResult convert = run_cli("convert-mastodon --src " + dir.file("src") +
                                  " --out " + dir.file("data"));
  CAPTURE(convert.output);
  REQUIRE(convert.status == 0);
  CHECK(convert.output.find("269") == std::string::npos);  // post-carve split
  CHECK(convert.output.find("distinct train tokens: 5330") !=
        std::string::npos);
  CHECK(file_exists(dir.file("data/train.jsonl")));
  CHECK(file_exists(dir.file("data/dev.jsonl")));
  CHECK(file_exists(dir.file("data/test.jsonl")));
}

TEST_CASE("the training command writes a usable run directory") {
  testing::TmpDir dir("cli_train");
  write_toy_canonical(dir.file("data"));
  const std::string flags =
      " --d 16 --d-emb 8 --layers 1 --dropout 0 --epochs 40 --batch-size 2"
      " --lr 0.01 --seed 5 --relation coattention";

  CommandResult trained = run_cli("train --data " + dir.file("data") +
                                  " --out " + dir.file("run") + flags);
  CAPTURE(trained.output);
  REQUIRE(trained.status == 0);
  CHECK(trained.output.find("best epoch") != std::string::npos);
  CHECK(file_exists(dir.file("run/checkpoint.bin")));
  CHECK(file_exists(dir.file("run/train_log.jsonl")));
  CHECK(file_exists(dir.file("run/config.txt")));
  CHECK(file_exists(dir.file("run/report_da.json")));
  CHECK(file_exists(dir.file("run/report_sentiment.json")));

  const std::string report = read_file(dir.file("run/report_da.json"));
  nlohmann::json parsed = nlohmann::json::parse(report);
  CHECK(parsed["task"] == "dialog_act");
  CHECK(parsed["per_label"].is_array());

  SUBCASE("eval scores any split of a canonical corpus") {
    CommandResult eval = run_cli("eval --checkpoint " +
                                 dir.file("run/checkpoint.bin") + " --data " +
                                 dir.file("data") + " --split dev --out " +
                                 dir.file("eval"));
    CAPTURE(eval.output);
    REQUIRE(eval.status == 0);
    CHECK(eval.output.find("dialog_act") != std::string::npos);
    CHECK(eval.output.find("sentiment") != std::string::npos);
    CHECK(file_exists(dir.file("eval/report_da.json")));
  }

  SUBCASE("predict labels an unlabeled file") {
    // strip the gold labels to exercise the labels-optional path
    std::string unlabeled;
    std::istringstream in(read_file(dir.file("data/test.jsonl")));
    std::string line;
    while (std::getline(in, line)) {
      nlohmann::json jd = nlohmann::json::parse(line);
      for (nlohmann::json& ju : jd["utterances"]) {
        ju.erase("da");
        ju.erase("sentiment");
      }
      unlabeled += jd.dump();
      unlabeled += '\n';
    }
    atomic_write_file(dir.file("bare.jsonl"), unlabeled);

    CommandResult predicted = run_cli(
        "predict --checkpoint " + dir.file("run/checkpoint.bin") +
        " --input " + dir.file("bare.jsonl") + " --out " +
        dir.file("preds.jsonl"));
    CAPTURE(predicted.output);
    REQUIRE(predicted.status == 0);

    std::istringstream preds(read_file(dir.file("preds.jsonl")));
    int utterances = 0;
    while (std::getline(preds, line)) {
      nlohmann::json jd = nlohmann::json::parse(line);
      for (const nlohmann::json& ju : jd["utterances"]) {
        CHECK(ju.contains("da_pred"));
        CHECK(ju.contains("sentiment_pred"));
        CHECK_FALSE(ju.contains("da"));
        ++utterances;
      }
    }
    CHECK(utterances == 6);
  }

  SUBCASE("export-attention dumps one CSV per recorded map") {
    CommandResult exported = run_cli(
        "export-attention --checkpoint " + dir.file("run/checkpoint.bin") +
        " --data " + dir.file("data") + " --split train --dialog-id toy-0" +
        " --out " + dir.file("attn"));
    CAPTURE(exported.output);
    REQUIRE(exported.status == 0);
    CHECK(file_exists(dir.file("attn/encoder_self_attention.csv")));
    CHECK(file_exists(dir.file("attn/relation_0_act_from_sentiment.csv")));
    CHECK(file_exists(dir.file("attn/relation_0_sentiment_from_act.csv")));

    // toy-0 has three utterances: a 3x3 map with three comma-split cells
    std::istringstream csv(
        read_file(dir.file("attn/relation_0_act_from_sentiment.csv")));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
      CHECK(std::count(line.begin(), line.end(), ',') == 2);
      ++rows;
    }
    CHECK(rows == 3);
  }
}

TEST_CASE("two runs with one seed are byte-identical; a reseed is not") {
  testing::TmpDir dir("cli_seed");
  write_toy_canonical(dir.file("data"));
  const std::string flags =
      " --d 16 --d-emb 8 --layers 1 --epochs 4 --batch-size 2 --seed 9";

  REQUIRE(run_cli("train --data " + dir.file("data") + " --out " +
                  dir.file("a") + flags).status == 0);
  REQUIRE(run_cli("train --data " + dir.file("data") + " --out " +
                  dir.file("b") + flags).status == 0);
  CHECK(read_file(dir.file("a/train_log.jsonl")) ==
        read_file(dir.file("b/train_log.jsonl")));
  CHECK(read_file(dir.file("a/checkpoint.bin")) ==
        read_file(dir.file("b/checkpoint.bin")));

  REQUIRE(run_cli("train --data " + dir.file("data") + " --out " +
                  dir.file("c") + flags + " --seed 10").status == 0);
  CHECK(read_file(dir.file("c/train_log.jsonl")) !=
        read_file(dir.file("a/train_log.jsonl")));
}

TEST_CASE("flags override the config file") {
  testing::TmpDir dir("cli_config");
  write_toy_canonical(dir.file("data"));
  atomic_write_file(dir.file("base.txt"),
                    "d = 16\nd_emb = 8\nlayers = 1\nepochs = 7\n"
                    "batch_size = 2\nrelation = mlp\n");

  CommandResult trained = run_cli(
      "train --data " + dir.file("data") + " --out " + dir.file("run") +
      " --config " + dir.file("base.txt") + " --epochs 2");
  CAPTURE(trained.output);
  REQUIRE(trained.status == 0);

  const std::string written = read_file(dir.file("run/config.txt"));
  CHECK(written.find("epochs = 2") != std::string::npos);
  CHECK(written.find("relation = mlp") != std::string::npos);

  std::istringstream log(read_file(dir.file("run/train_log.jsonl")));
  std::string line;
  int epochs = 0;
  while (std::getline(log, line)) ++epochs;
  CHECK(epochs == 2);
}

TEST_CASE("the gradcheck command reports and exits by outcome") {
  CommandResult good =
      run_cli("gradcheck --d 8 --d-emb 4 --layers 1 --dropout 0");
  CAPTURE(good.output);
  CHECK(good.status == 0);
  CHECK(good.output.find("gradient check passed") != std::string::npos);

  CommandResult bad = run_cli(
      "gradcheck --d 8 --d-emb 4 --layers 1 --dropout 0 --corrupt "
      "decoder.w_da");
  CAPTURE(bad.output);
  CHECK(bad.status == 1);
  CHECK(bad.output.find("gradient check FAILED") != std::string::npos);
  CHECK(bad.output.find("decoder.w_da") != std::string::npos);
}

TEST_CASE("bad invocations fail loudly") {
  CHECK(run_cli("no-such-command").status != 0);
  CHECK(run_cli("train --out /tmp/nowhere").status != 0);  // --data missing

  CommandResult missing =
      run_cli("eval --checkpoint /nonexistent.bin --data /nonexistent");
  CHECK(missing.status == 1);
  CHECK(missing.output.find("error:") != std::string::npos);
}
