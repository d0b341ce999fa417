#include "dcrnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "dcrnet/adam.hpp"
#include "dcrnet/decoder.hpp"

namespace dcrnet {

namespace {

void gather_gold(const EncodedDialog& dialog, std::vector<std::int64_t>& da,
                 std::vector<std::int64_t>& sentiment) {
  for (const EncodedUtterance& u : dialog.utterances) {
    da.push_back(u.da);
    sentiment.push_back(u.sentiment);
  }
}

void require_labeled(const std::vector<EncodedDialog>& split,
                     const char* split_name) {
  for (const EncodedDialog& dialog : split) {
    for (std::size_t t = 0; t < dialog.utterances.size(); ++t) {
      if (dialog.utterances[t].da < 0 || dialog.utterances[t].sentiment < 0) {
        throw std::invalid_argument(
            std::string("train: ") + split_name + " dialog \"" + dialog.id +
            "\" utterance " + std::to_string(t) + " is missing labels");
      }
    }
  }
}

double selection_metric(const std::string& selection, const EvalPair& eval) {
  if (selection == "da") return eval.da.f1;
  if (selection == "sentiment") return eval.sentiment.f1;
  return 0.5 * (eval.da.f1 + eval.sentiment.f1);
}

Tensor squared_norm(const std::vector<Tensor>& params) {
  Tensor total;
  for (const Tensor& p : params) {
    Tensor term = sum_all(mul(p, p));
    total = total.defined() ? add(total, term) : term;
  }
  return total;
}

}  // namespace

EvalPair evaluate_split(const Model& model,
                        const std::vector<EncodedDialog>& split,
                        const LabelMap& da_labels,
                        const LabelMap& sentiment_labels) {
  std::vector<std::int64_t> da_gold, da_pred, s_gold, s_pred;
  Rng unused(0);  // eval mode draws nothing
  for (const EncodedDialog& dialog : split) {
    Model::Forward out = model.forward(dialog, /*training=*/false, unused);
    gather_gold(dialog, da_gold, s_gold);
    da_pred.insert(da_pred.end(), out.predictions.da_pred.begin(),
                   out.predictions.da_pred.end());
    s_pred.insert(s_pred.end(), out.predictions.sent_pred.begin(),
                  out.predictions.sent_pred.end());
  }

  const ModelConfig& config = model.config();
  EvalPair pair;
  if (config.protocol == Protocol::DailyDialog) {
    pair.da = macro_prf(da_gold, da_pred, da_labels.size());
    pair.sentiment = macro_prf(s_gold, s_pred, sentiment_labels.size());
  } else {
    pair.da = prevalence_weighted_f1(da_gold, da_pred, da_labels.size());
    const auto neutral = sentiment_labels.neutral_index();
    if (!neutral) {
      pair.sentiment = macro_prf(s_gold, s_pred, sentiment_labels.size());
    } else if (config.neutral_exclusion == NeutralExclusion::FromAverage) {
      pair.sentiment =
          macro_prf(s_gold, s_pred, sentiment_labels.size(), *neutral);
    } else {
      std::vector<std::int64_t> g = s_gold, p = s_pred;
      drop_gold_label(g, p, *neutral);
      pair.sentiment = macro_prf(g, p, sentiment_labels.size(), *neutral);
    }
  }
  pair.da.task = "dialog_act";
  pair.sentiment.task = "sentiment";
  name_labels(pair.da, da_labels.labels());
  name_labels(pair.sentiment, sentiment_labels.labels());
  return pair;
}

TrainOutcome train(const ModelConfig& config, const Corpus& corpus) {
  config.validate();
  if (config.epochs < 1) {
    throw std::invalid_argument("train: epochs must be at least 1");
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("train: batch_size must be at least 1");
  }
  if (corpus.train.empty()) {
    throw std::invalid_argument("train: empty training split");
  }
  if (corpus.dev.empty()) {
    throw std::invalid_argument(
        "train: a dev split is required for model selection");
  }

  Vocabulary vocab = Vocabulary::build(corpus.train, config.min_freq);
  std::vector<EncodedDialog> train_set =
      encode_split(corpus.train, vocab, corpus.da_labels,
                   corpus.sentiment_labels);
  std::vector<EncodedDialog> dev_set = encode_split(
      corpus.dev, vocab, corpus.da_labels, corpus.sentiment_labels);
  require_labeled(train_set, "training");
  require_labeled(dev_set, "dev");

  Rng root(config.seed);
  Rng init_rng = root.fork(1);
  Rng shuffle_rng = root.fork(2);
  Rng dropout_rng = root.fork(3);

  Model model(config, vocab.size(), corpus.da_labels.size(),
              corpus.sentiment_labels.size(), init_rng);
  std::vector<NamedParam> named = model.parameters();
  std::vector<Tensor> params;
  params.reserve(named.size());
  for (const NamedParam& p : named) params.push_back(p.tensor);
  AdamState optimizer = AdamState::init(params);
  AdamConfig adam;
  adam.lr = config.lr;

  TrainOutcome outcome;
  double best_metric = -std::numeric_limits<double>::infinity();
  std::deque<double> recent_losses;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::int64_t seen = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(),
                   start + static_cast<std::size_t>(config.batch_size));
      Tensor batch_sum;
      for (std::size_t i = start; i < stop; ++i) {
        const EncodedDialog& dialog = train_set[order[i]];
        Model::Forward out = model.forward(dialog, /*training=*/true,
                                           dropout_rng);
        std::vector<std::int64_t> gold_da, gold_sent;
        gather_gold(dialog, gold_da, gold_sent);
        Tensor loss = joint_loss(out.predictions, gold_da, gold_sent);
        batch_sum = batch_sum.defined() ? add(batch_sum, loss) : loss;
      }
      const double batch_n = static_cast<double>(stop - start);
      Tensor objective = scale(batch_sum, 1.0 / batch_n);
      if (config.l2 > 0.0) {
        objective = add(objective, scale(squared_norm(params), config.l2));
      }

      const double value = objective.item();
      if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "training diverged: loss became non-finite at epoch " << epoch
            << ", batch " << (start / config.batch_size + 1)
            << "; preceding batch losses:";
        if (recent_losses.empty()) msg << " (none)";
        for (double prev : recent_losses)
          msg << " " << std::setprecision(6) << prev;
        throw std::runtime_error(msg.str());
      }
      recent_losses.push_back(value);
      if (recent_losses.size() > 5) recent_losses.pop_front();

      GradRecord record = backward(objective);
      std::vector<Tensor> grads;
      grads.reserve(params.size());
      for (const Tensor& p : params) grads.push_back(record.grad(p));
      adam_step(params, grads, optimizer, adam);

      loss_sum += value * batch_n;
      seen += stop - start;
    }

    EpochLog row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(seen);
    EvalPair dev_eval = evaluate_split(model, dev_set, corpus.da_labels,
                                       corpus.sentiment_labels);
    row.dev_da_f1 = dev_eval.da.f1;
    row.dev_sc_f1 = dev_eval.sentiment.f1;
    const double metric = selection_metric(config.selection, dev_eval);
    row.selected = metric > best_metric;
    if (row.selected) {
      best_metric = metric;
      outcome.best = Checkpoint::capture(model, optimizer, vocab,
                                         corpus.da_labels,
                                         corpus.sentiment_labels, epoch,
                                         dev_eval.da.f1, dev_eval.sentiment.f1);
    }
    outcome.log.push_back(row);

    nlohmann::json line = {{"epoch", row.epoch},
                           {"train_loss", row.train_loss},
                           {"dev_da_f1", row.dev_da_f1},
                           {"dev_sc_f1", row.dev_sc_f1},
                           {"selected", row.selected}};
    outcome.log_jsonl += line.dump();
    outcome.log_jsonl += '\n';
  }
  return outcome;
}

GradCheckResult gradcheck_model(const ModelConfig& config, std::uint64_t seed,
                                const std::string& corrupt_param) {
  config.validate();
  const std::int64_t vocab_size = 11, n_da = 3, n_sent = 3;
  EncodedDialog dialog;
  dialog.id = "gradcheck";
  dialog.utterances = {{{2, 5, 7}, 0, 2}, {{3, 9}, 2, 1}};
  std::vector<std::int64_t> gold_da, gold_sent;
  gather_gold(dialog, gold_da, gold_sent);

  Rng init_rng(seed);
  Model model(config, vocab_size, n_da, n_sent, init_rng);
  std::vector<NamedParam> named = model.parameters();
  std::vector<Tensor> params;
  for (const NamedParam& p : named) params.push_back(p.tensor);

  // Dropout is skipped (training=false) so the objective is a fixed
  // function of the parameters, as central differences require.
  auto build_loss = [&]() {
    Rng unused(0);
    Model::Forward out = model.forward(dialog, /*training=*/false, unused);
    Tensor loss = joint_loss(out.predictions, gold_da, gold_sent);
    if (config.l2 > 0.0) {
      loss = add(loss, scale(squared_norm(params), config.l2));
    }
    return loss;
  };

  GradRecord record = backward(build_loss());

  GradCheckResult result;
  bool corrupt_found = corrupt_param.empty();
  const double h = 1e-5;
  for (NamedParam& p : named) {
    std::vector<double> analytic = record.grad(p.tensor).values();
    if (p.name == corrupt_param) {
      corrupt_found = true;
      for (double& g : analytic) g += 0.5;
    }
    std::vector<double>& v = p.tensor.values_mut();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + h;
      const double up = build_loss().item();
      v[i] = saved - h;
      const double down = build_loss().item();
      v[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double rel =
          std::abs(analytic[i] - numeric) /
          std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
      ++result.checked_values;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = p.name;
      }
    }
  }
  if (!corrupt_found) {
    throw std::invalid_argument("gradcheck: no parameter named \"" +
                                corrupt_param + "\"");
  }
  result.passed = result.max_rel_err < 1e-4;
  return result;
}

}  // namespace dcrnet
