#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcrnet/checkpoint.hpp"
#include "dcrnet/converters.hpp"
#include "dcrnet/io_util.hpp"
#include "dcrnet/synthetic.hpp"
#include "dcrnet/trainer.hpp"

namespace fs = std::filesystem;
using namespace dcrnet;

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Hyperparameter flags funnel through ModelConfig::set so the CLI, the
// config file, and the checkpoint header all share one spelling per key.
void add_config_options(CLI::App* cmd, std::string& config_path,
                        Overrides& overrides) {
  cmd->add_option("--config", config_path,
                  "key=value config file; flags below override it");
  auto opt = [cmd, &overrides](const std::string& flag, const char* key,
                               const char* desc) {
    cmd->add_option_function<std::string>(
           flag,
           [&overrides, key](const std::string& value) {
             overrides.emplace_back(key, value);
           },
           desc)
        ->trigger_on_parse();  // repeats apply in order, last one wins
  };
  opt("--d-emb", "d_emb", "token embedding width");
  opt("--d", "d", "hidden width (even)");
  opt("--d-k", "d_k", "attention projection width (0: use d)");
  opt("--relation", "relation",
      "interaction kind: concat | mlp | coattention | none");
  opt("--layers", "layers", "stacked interaction layers");
  opt("--dropout", "dropout", "dropout probability");
  opt("--l2", "l2", "L2 penalty weight");
  opt("--lr", "lr", "Adam learning rate");
  opt("--epochs", "epochs", "training epochs");
  opt("--batch-size", "batch_size", "dialogs per update");
  opt("--seed", "seed", "root RNG seed");
  opt("--min-freq", "min_freq", "minimum token frequency kept");
  opt("--no-self-attention", "no_self_attention", "true/false ablation");
  opt("--cnn-context", "cnn_context", "true/false: convolution context");
  opt("--utterance-repr", "utterance_repr", "last_position | direction_ends");
  opt("--shared-fusion-mlp", "shared_fusion_mlp", "true/false");
  opt("--tie-layers", "tie_layers", "true/false: share layer weights");
  opt("--pre-transform-once", "pre_transform_once", "true/false");
  opt("--dropout-embeddings", "dropout_embeddings", "true/false");
  opt("--dropout-context", "dropout_context", "true/false");
  opt("--selection", "selection", "dev metric: mean | da | sentiment");
  opt("--protocol", "protocol", "scoring: mastodon | dailydialog");
  opt("--neutral-exclusion", "neutral_exclusion",
      "from_average | from_data");
}

ModelConfig resolve_config(const std::string& config_path,
                           const Overrides& overrides,
                           const ModelConfig& base = ModelConfig()) {
  ModelConfig config = base;
  if (!config_path.empty()) {
    config = ModelConfig::from_kv_text(read_file(config_path));
  }
  for (const auto& [key, value] : overrides) config.set(key, value);
  config.validate();
  return config;
}

// Finite differences visit every parameter value, so the check only ever
// runs at toy width; flags can still override any of these.
ModelConfig gradcheck_base() {
  ModelConfig base;
  base.d_emb = 4;
  base.d = 8;
  base.layers = 1;
  base.dropout = 0.0;
  base.l2 = 1e-4;
  return base;
}

LabelMap map_of(const std::vector<std::string>& labels) {
  return LabelMap::over(labels);
}

std::vector<Dialog>& split_of(Corpus& corpus, const std::string& name) {
  if (name == "train") return corpus.train;
  if (name == "dev") return corpus.dev;
  if (name == "test") return corpus.test;
  throw std::invalid_argument("unknown split \"" + name +
                              "\" (expected train, dev or test)");
}

void print_stats(const ConversionStats& stats) {
  std::cout << "train: " << stats.train_dialogs << " dialogs / "
            << stats.train_utterances << " utterances\n"
            << "dev:   " << stats.dev_dialogs << " dialogs / "
            << stats.dev_utterances << " utterances\n"
            << "test:  " << stats.test_dialogs << " dialogs / "
            << stats.test_utterances << " utterances\n"
            << "distinct train tokens: " << stats.distinct_train_tokens
            << "\n";
}

std::string csv_of(const Tensor& matrix) {
  std::ostringstream out;
  out.precision(17);
  for (std::int64_t r = 0; r < matrix.rows(); ++r) {
    for (std::int64_t c = 0; c < matrix.cols(); ++c) {
      if (c) out << ',';
      out << matrix.at(r, c);
    }
    out << '\n';
  }
  return out.str();
}

void write_reports(const EvalPair& eval, const std::string& out_dir) {
  atomic_write_file((fs::path(out_dir) / "report_da.json").string(),
                    report_json(eval.da));
  atomic_write_file((fs::path(out_dir) / "report_sentiment.json").string(),
                    report_json(eval.sentiment));
}

int run_train(const std::string& data, const std::string& out_dir,
              const ModelConfig& config) {
  Corpus corpus = load_canonical(data);
  TrainOutcome outcome = train(config, corpus);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  save_checkpoint(outcome.best, (out / "checkpoint.bin").string());
  atomic_write_file((out / "train_log.jsonl").string(), outcome.log_jsonl);
  atomic_write_file((out / "config.txt").string(), config.to_kv_text());

  std::cout << "best epoch " << outcome.best.epoch << ": dev dialog-act f1 "
            << outcome.best.dev_da_f1 << ", dev sentiment f1 "
            << outcome.best.dev_sc_f1 << "\n";

  if (!corpus.test.empty()) {
    Model best = restore_model(outcome.best);
    Vocabulary vocab = restore_vocab(outcome.best);
    std::vector<EncodedDialog> test = encode_split(
        corpus.test, vocab, corpus.da_labels, corpus.sentiment_labels);
    EvalPair eval = evaluate_split(best, test, corpus.da_labels,
                                   corpus.sentiment_labels);
    write_reports(eval, out_dir);
    std::cout << report_table(eval.da) << report_table(eval.sentiment);
  }
  return 0;
}

int run_eval(const std::string& checkpoint_path, const std::string& data,
             const std::string& split, const std::string& out_dir) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Model model = restore_model(ckpt);
  Vocabulary vocab = restore_vocab(ckpt);
  LabelMap da = map_of(ckpt.da_labels);
  LabelMap sent = map_of(ckpt.sentiment_labels);

  Corpus corpus = load_canonical(data);
  const std::vector<Dialog>& dialogs = split_of(corpus, split);
  if (dialogs.empty()) {
    throw std::runtime_error("split \"" + split + "\" of " + data +
                             " is empty");
  }
  std::vector<EncodedDialog> encoded = encode_split(dialogs, vocab, da, sent);
  EvalPair eval = evaluate_split(model, encoded, da, sent);
  std::cout << report_table(eval.da) << report_table(eval.sentiment);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_reports(eval, out_dir);
  }
  return 0;
}

int run_predict(const std::string& checkpoint_path, const std::string& input,
                const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Model model = restore_model(ckpt);
  Vocabulary vocab = restore_vocab(ckpt);
  LabelMap da = map_of(ckpt.da_labels);
  LabelMap sent = map_of(ckpt.sentiment_labels);

  std::vector<Dialog> dialogs = load_dialog_file(input,
                                                 /*require_labels=*/false);
  Rng unused(0);
  std::string lines;
  for (const Dialog& dialog : dialogs) {
    EncodedDialog encoded = encode_dialog(dialog, vocab, da, sent);
    Model::Forward out = model.forward(encoded, /*training=*/false, unused);
    nlohmann::json jd;
    jd["id"] = dialog.id;
    nlohmann::json jutts = nlohmann::json::array();
    for (std::size_t t = 0; t < dialog.utterances.size(); ++t) {
      const Utterance& u = dialog.utterances[t];
      nlohmann::json ju;
      ju["speaker"] =
          u.speaker ? nlohmann::json(*u.speaker) : nlohmann::json(nullptr);
      ju["tokens"] = u.tokens;
      if (!u.da.empty()) ju["da"] = u.da;
      if (!u.sentiment.empty()) ju["sentiment"] = u.sentiment;
      ju["da_pred"] = da.label_of(out.predictions.da_pred[t]);
      ju["sentiment_pred"] = sent.label_of(out.predictions.sent_pred[t]);
      jutts.push_back(std::move(ju));
    }
    jd["utterances"] = std::move(jutts);
    lines += jd.dump();
    lines += '\n';
  }
  atomic_write_file(out_path, lines);
  std::cout << "wrote predictions for " << dialogs.size() << " dialogs to "
            << out_path << "\n";
  return 0;
}

int run_gradcheck(const ModelConfig& config, std::uint64_t seed,
                  const std::string& corrupt) {
  GradCheckResult result = gradcheck_model(config, seed, corrupt);
  std::cout << "checked " << result.checked_values
            << " values; max relative error " << result.max_rel_err << " ("
            << result.worst_param << ")\n"
            << (result.passed ? "gradient check passed"
                              : "gradient check FAILED")
            << "\n";
  return result.passed ? 0 : 1;
}

int run_export_attention(const std::string& checkpoint_path,
                         const std::string& data, const std::string& split,
                         const std::string& dialog_id,
                         const std::string& out_dir) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Model model = restore_model(ckpt);
  Vocabulary vocab = restore_vocab(ckpt);
  LabelMap da = map_of(ckpt.da_labels);
  LabelMap sent = map_of(ckpt.sentiment_labels);

  Corpus corpus = load_canonical(data);
  const std::vector<Dialog>& dialogs = split_of(corpus, split);
  const Dialog* found = nullptr;
  for (const Dialog& dialog : dialogs) {
    if (dialog.id == dialog_id) {
      found = &dialog;
      break;
    }
  }
  if (!found) {
    throw std::runtime_error("no dialog \"" + dialog_id + "\" in the " +
                             split + " split");
  }

  EncodedDialog encoded = encode_dialog(*found, vocab, da, sent);
  Rng unused(0);
  Model::Forward out = model.forward(encoded, /*training=*/false, unused);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  int written = 0;
  if (out.encoding.attention_weights.defined()) {
    atomic_write_file((dir / "encoder_self_attention.csv").string(),
                      csv_of(out.encoding.attention_weights));
    ++written;
  }
  const StackTrace& trace = out.stacked.trace;
  for (std::size_t layer = 0; layer < trace.d_from_s.size(); ++layer) {
    const std::string tag = "relation_" + std::to_string(layer);
    atomic_write_file((dir / (tag + "_act_from_sentiment.csv")).string(),
                      csv_of(trace.d_from_s[layer]));
    atomic_write_file((dir / (tag + "_sentiment_from_act.csv")).string(),
                      csv_of(trace.s_from_d[layer]));
    written += 2;
  }
  if (written == 0) {
    std::cout << "this configuration records no attention maps\n";
  } else {
    std::cout << "wrote " << written << " attention maps to " << out_dir
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint dialog-act and sentiment model"};
  app.require_subcommand(1);

  // make-fixture
  auto* fixture = app.add_subcommand(
      "make-fixture", "write a synthetic source corpus for smoke runs");
  std::string fixture_out;
  std::uint64_t fixture_seed = 20240817;
  fixture->add_option("--out", fixture_out, "destination directory")
      ->required();
  fixture->add_option("--seed", fixture_seed, "generator seed");

  // convert-mastodon / convert-dailydialog
  std::string conv_src, conv_out;
  auto* mastodon = app.add_subcommand(
      "convert-mastodon", "source train.json/test.json to canonical jsonl");
  mastodon->add_option("--src", conv_src, "source directory")->required();
  mastodon->add_option("--out", conv_out, "destination directory")
      ->required();
  auto* daily = app.add_subcommand(
      "convert-dailydialog", "official text dumps to canonical jsonl");
  daily->add_option("--src", conv_src, "source directory")->required();
  daily->add_option("--out", conv_out, "destination directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "fit a model and keep the "
                                                "best dev checkpoint");
  std::string train_data, train_out, train_config;
  Overrides train_overrides;
  train_cmd->add_option("--data", train_data,
                        "canonical corpus directory")->required();
  train_cmd->add_option("--out", train_out, "output directory")->required();
  add_config_options(train_cmd, train_config, train_overrides);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on a split");
  std::string eval_ckpt, eval_data, eval_split = "test", eval_out;
  eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint file")
      ->required();
  eval_cmd->add_option("--data", eval_data, "canonical corpus directory")
      ->required();
  eval_cmd->add_option("--split", eval_split, "train | dev | test");
  eval_cmd->add_option("--out", eval_out, "directory for JSON reports");

  // predict
  auto* predict_cmd = app.add_subcommand(
      "predict", "label dialogs (gold labels optional in the input)");
  std::string pred_ckpt, pred_in, pred_out;
  predict_cmd->add_option("--checkpoint", pred_ckpt, "checkpoint file")
      ->required();
  predict_cmd->add_option("--input", pred_in, "canonical jsonl file")
      ->required();
  predict_cmd->add_option("--out", pred_out, "output jsonl file")->required();

  // gradcheck
  auto* grad_cmd = app.add_subcommand(
      "gradcheck", "compare analytic gradients with central differences");
  std::string grad_config, grad_corrupt;
  std::uint64_t grad_seed = 11;
  Overrides grad_overrides;
  grad_cmd->add_option("--check-seed", grad_seed, "init seed for the check");
  grad_cmd->add_option("--corrupt", grad_corrupt,
                       "tensor name whose gradient is deliberately offset");
  add_config_options(grad_cmd, grad_config, grad_overrides);

  // export-attention
  auto* export_cmd = app.add_subcommand(
      "export-attention", "dump attention maps for one dialog as CSV");
  std::string exp_ckpt, exp_data, exp_split = "test", exp_id, exp_out;
  export_cmd->add_option("--checkpoint", exp_ckpt, "checkpoint file")
      ->required();
  export_cmd->add_option("--data", exp_data, "canonical corpus directory")
      ->required();
  export_cmd->add_option("--split", exp_split, "train | dev | test");
  export_cmd->add_option("--dialog-id", exp_id, "dialog to export")
      ->required();
  export_cmd->add_option("--out", exp_out, "destination directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fixture->parsed()) {
      write_source_fixture(fixture_out, fixture_seed);
      std::cout << "wrote train.json and test.json to " << fixture_out
                << "\n";
      return 0;
    }
    if (mastodon->parsed()) {
      print_stats(convert_mastodon(conv_src, conv_out));
      return 0;
    }
    if (daily->parsed()) {
      print_stats(convert_dailydialog(conv_src, conv_out));
      return 0;
    }
    if (train_cmd->parsed()) {
      return run_train(train_data, train_out,
                       resolve_config(train_config, train_overrides));
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_ckpt, eval_data, eval_split, eval_out);
    }
    if (predict_cmd->parsed()) {
      return run_predict(pred_ckpt, pred_in, pred_out);
    }
    if (grad_cmd->parsed()) {
      ModelConfig config =
          resolve_config(grad_config, grad_overrides, gradcheck_base());
      return run_gradcheck(config, grad_seed, grad_corrupt);
    }
    if (export_cmd->parsed()) {
      return run_export_attention(exp_ckpt, exp_data, exp_split, exp_id,
                                  exp_out);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
