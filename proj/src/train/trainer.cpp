// Copyright 2026 The seqrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqrec/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>

#include "seqrec/ad/adam.hpp"
#include "seqrec/ad/tape.hpp"
#include "seqrec/ad/tensor.hpp"
#include "seqrec/common.hpp"
#include "seqrec/eval/evaluate.hpp"
#include "seqrec/models/attention.hpp"
#include "seqrec/models/checkpoint.hpp"
#include "seqrec/models/counting.hpp"
#include "seqrec/models/gru.hpp"
#include "seqrec/models/indexer.hpp"
#include "seqrec/models/lr.hpp"
#include "seqrec/models/mlp.hpp"
#include "seqrec/models/narm.hpp"
#include "seqrec/rng.hpp"
#include "seqrec/train/batching.hpp"

namespace seqrec {

void TrainConfig::validate() const {
  require(lr > 0.0, "train: lr must be positive");
  require(max_epochs >= 1, "train: max_epochs must be at least 1");
  require(patience >= 1, "train: patience must be at least 1");
  require(batch_size >= 1, "train: batch_size must be at least 1");
  require(warmup_steps >= 0, "train: warmup_steps must be non-negative");
  require(mask_prob > 0.0 && mask_prob < 1.0, "train: mask_prob must be in (0, 1)");
  require(max_seq_len > 0, "train: max_seq_len must be positive");
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["hyper"] = hyper;
  nlohmann::ordered_json c;
  c["lr"] = config.lr;
  c["max_epochs"] = config.max_epochs;
  c["patience"] = config.patience;
  c["batch_size"] = config.batch_size;
  c["warmup_steps"] = config.warmup_steps;
  c["mask_prob"] = config.mask_prob;
  c["max_seq_len"] = config.max_seq_len;
  c["seed"] = config.seed;
  c["gru_sequence_mode"] = config.gru_sequence_mode;
  j["config"] = std::move(c);
  j["rng_algorithm"] = rng_algorithm;
  j["val_recall3"] = val_recall3;
  j["train_loss"] = train_loss;
  j["best_epoch"] = best_epoch;
  j["epochs_run"] = epochs_run;
  j["diverged"] = diverged;
  j["diverged_epoch"] = diverged_epoch;
  return j;
}

namespace {

// RNG stream ids derived from the run seed; one independent stream per
// concern so changing e.g. the dropout draw count cannot shift batch order.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamOrder = 2;
constexpr std::uint64_t kStreamDropout = 3;
constexpr std::uint64_t kStreamSample = 4;

// One optimizer step on an already-built scalar loss. Returns loss value.
double descend(const Tensor& loss, Tape& tape, Adam& opt, double lr_now) {
  double value = loss.item();
  opt.zero_grad();
  tape.backward(loss);
  opt.step(lr_now);
  return value;
}

// Accumulates a per-term weighted mean of batch losses over one epoch.
struct LossMeter {
  double weighted_sum = 0.0;
  double total_terms = 0.0;

  void add(double batch_loss, double n_terms) {
    weighted_sum += batch_loss * n_terms;
    total_terms += n_terms;
  }
  double mean() const { return total_terms > 0.0 ? weighted_sum / total_terms : 0.0; }
};

// Multi-hot design matrix for a chunk of (session, prefix_len) instances,
// with each prefix truncated to its most recent l_max events.
Tensor multi_hot_batch(std::span<const Instance> chunk,
                       const std::vector<std::vector<std::int32_t>>& sessions,
                       std::int64_t l_max, std::int32_t n_items) {
  std::int64_t b = static_cast<std::int64_t>(chunk.size());
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(b * n_items));
  for (const Instance& inst : chunk) {
    const auto& s = sessions[static_cast<std::size_t>(inst.session)];
    std::int64_t len = inst.prefix_len;
    std::int64_t start = len > l_max ? len - l_max : 0;
    std::vector<double> row = multi_hot(
        std::span<const std::int32_t>(s.data() + start, static_cast<std::size_t>(len - start)),
        n_items);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  return Tensor::from_data({b, n_items}, std::move(rows));
}

std::vector<std::int32_t> chunk_target_cols(
    std::span<const Instance> chunk,
    const std::vector<std::vector<std::int32_t>>& sessions) {
  std::vector<std::int32_t> cols;
  cols.reserve(chunk.size());
  for (const Instance& inst : chunk) {
    const auto& s = sessions[static_cast<std::size_t>(inst.session)];
    cols.push_back(s[static_cast<std::size_t>(inst.prefix_len)] - 1);
  }
  return cols;
}

// Shuffled index order over n elements, fresh each call.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  return idx;
}

}  // namespace

TrainResult train_model(const std::string& kind, const nlohmann::json& hyper,
                        const TrainConfig& cfg, ItemIndexer indexer,
                        const std::vector<std::vector<std::int32_t>>& train_sessions,
                        const std::vector<std::vector<std::int32_t>>& val_sessions) {
  cfg.validate();
  require_data(!train_sessions.empty(), "train: empty training split");
  require_data(!val_sessions.empty(), "train: empty validation split");

  RunManifest manifest;
  manifest.kind = kind;
  manifest.hyper = hyper;
  manifest.config = cfg;
  manifest.rng_algorithm = Rng::kAlgorithm;

  EvalConfig eval_cfg;  // cutoffs 1 and 3

  // Counting baselines have a closed-form fit: one "epoch", no loss.
  if (kind == "pop" || kind == "markov") {
    std::unique_ptr<Ranker> model;
    if (kind == "pop") {
      model = pop_fit(train_sessions, indexer, cfg.max_seq_len);
    } else {
      model = markov_fit(train_sessions, indexer, cfg.max_seq_len);
    }
    EvalReport rep = evaluate(*model, val_sessions, eval_cfg);
    manifest.val_recall3.push_back(rep.recall_at(3));
    manifest.train_loss.push_back(0.0);
    manifest.best_epoch = 1;
    manifest.epochs_run = 1;
    return {std::move(model), std::move(manifest)};
  }

  Rng init_rng(Rng::derive(cfg.seed, kStreamInit));
  Rng order_rng(Rng::derive(cfg.seed, kStreamOrder));
  Rng dropout_rng(Rng::derive(cfg.seed, kStreamDropout));
  Rng sample_rng(Rng::derive(cfg.seed, kStreamSample));

  std::unique_ptr<Ranker> model =
      make_neural_model(kind, std::move(indexer), cfg.max_seq_len, hyper, init_rng);
  const std::int32_t n_items = model->indexer().n_items();
  const std::int64_t l_max = cfg.max_seq_len;

  std::vector<NamedTensor> named = named_parameters_of(*model);
  std::vector<Tensor> params;
  for (auto& nt : named) params.push_back(nt.tensor);
  Adam::Options opt_cfg;
  opt_cfg.lr = cfg.lr;
  Adam opt(params, opt_cfg);

  const bool use_warmup = (kind == "bert4rec") && cfg.warmup_steps > 0;
  auto next_lr = [&]() {
    if (!use_warmup) return cfg.lr;
    double step_1based = static_cast<double>(opt.steps_taken() + 1);
    double scale = std::min(1.0, step_1based / static_cast<double>(cfg.warmup_steps));
    return cfg.lr * scale;
  };

  const std::size_t bsz = static_cast<std::size_t>(cfg.batch_size);

  // Each regime closure runs one full pass over the training split and
  // returns the per-term mean loss.
  std::function<double()> run_epoch;

  if (kind == "lr" || kind == "mlp" || kind == "narm" ||
      (kind == "gru" && !cfg.gru_sequence_mode)) {
    auto instances =
        std::make_shared<std::vector<Instance>>(augment_subsequences(train_sessions));
    run_epoch = [=, &train_sessions, &order_rng, &dropout_rng, &opt,
                 model = model.get()]() {
      order_rng.shuffle(*instances);
      LossMeter meter;
      for (std::size_t at = 0; at < instances->size(); at += bsz) {
        std::size_t end = std::min(instances->size(), at + bsz);
        std::span<const Instance> chunk(instances->data() + at, end - at);
        Tape tape;
        TapeScope scope(tape);
        Tensor loss;
        if (kind == "lr" || kind == "mlp") {
          Tensor x = multi_hot_batch(chunk, train_sessions, l_max, n_items);
          auto cols = chunk_target_cols(chunk, train_sessions);
          if (kind == "lr") {
            loss = static_cast<LrModel*>(model)->loss_on_batch(x, cols);
          } else {
            loss = static_cast<MlpModel*>(model)->loss_on_batch(x, cols);
          }
        } else {
          InstanceBatch batch = materialize_batch(chunk, train_sessions, l_max);
          if (kind == "narm") {
            loss = static_cast<NarmModel*>(model)->loss_on_batch(
                batch.tokens, batch.target_cols, /*train=*/true, &dropout_rng);
          } else {
            loss = static_cast<GruModel*>(model)->loss_on_batch(
                batch.tokens, batch.target_cols, /*train=*/true, &dropout_rng);
          }
        }
        meter.add(descend(loss, tape, opt, next_lr()), static_cast<double>(chunk.size()));
      }
      return meter.mean();
    };
  } else if (kind == "gru") {  // sequence mode
    run_epoch = [=, &train_sessions, &order_rng, &dropout_rng, &opt,
                 model = model.get()]() {
      auto order = shuffled_indices(train_sessions.size(), order_rng);
      LossMeter meter;
      auto* gru = static_cast<GruModel*>(model);
      for (std::size_t at = 0; at < order.size(); at += bsz) {
        std::size_t end = std::min(order.size(), at + bsz);
        std::vector<std::vector<std::int32_t>> chunk;
        chunk.reserve(end - at);
        for (std::size_t i = at; i < end; ++i)
          chunk.push_back(train_sessions[order[i]]);
        TokenBatch batch = pack_left_padded(chunk, l_max, /*fixed_width=*/false);
        double n_terms = 0.0;
        for (std::int64_t r = 0; r < batch.batch; ++r) {
          for (std::int64_t t = 0; t + 1 < batch.width; ++t) {
            if (batch.mask[static_cast<std::size_t>(r * batch.width + t)] == 1.0 &&
                batch.mask[static_cast<std::size_t>(r * batch.width + t + 1)] == 1.0) {
              n_terms += 1.0;
            }
          }
        }
        Tape tape;
        TapeScope scope(tape);
        Tensor loss = gru->sequence_loss(batch, /*train=*/true, &dropout_rng);
        meter.add(descend(loss, tape, opt, next_lr()), n_terms);
      }
      return meter.mean();
    };
  } else if (kind == "sasrec") {
    run_epoch = [=, &train_sessions, &order_rng, &sample_rng, &dropout_rng, &opt,
                 model = model.get()]() {
      auto order = shuffled_indices(train_sessions.size(), order_rng);
      LossMeter meter;
      auto* sas = static_cast<SasrecModel*>(model);
      const std::int64_t s_width = l_max;
      for (std::size_t at = 0; at < order.size(); at += bsz) {
        std::size_t end = std::min(order.size(), at + bsz);
        std::size_t b = end - at;
        std::vector<std::vector<std::int32_t>> inputs;
        inputs.reserve(b);
        std::vector<std::int32_t> pos(b * static_cast<std::size_t>(s_width), 0);
        std::vector<std::int32_t> neg(b * static_cast<std::size_t>(s_width), 0);
        double n_terms = 0.0;
        for (std::size_t r = 0; r < b; ++r) {
          const auto& s = train_sessions[order[at + r]];
          std::int64_t in_len = static_cast<std::int64_t>(s.size()) - 1;
          std::int64_t keep = std::min(in_len, s_width);
          std::int64_t j0 = in_len - keep;  // first kept input position
          inputs.emplace_back(s.begin() + j0, s.begin() + in_len);
          for (std::int64_t i = 0; i < keep; ++i) {
            std::int64_t col = s_width - keep + i;
            std::int32_t p = s[static_cast<std::size_t>(j0 + i + 1)];
            std::int32_t ng;
            do {
              ng = static_cast<std::int32_t>(
                  sample_rng.next_below(static_cast<std::uint64_t>(n_items)) + 1);
            } while (ng == p);
            pos[r * static_cast<std::size_t>(s_width) + static_cast<std::size_t>(col)] = p;
            neg[r * static_cast<std::size_t>(s_width) + static_cast<std::size_t>(col)] = ng;
            n_terms += 1.0;
          }
        }
        TokenBatch batch = pack_left_padded(inputs, s_width, /*fixed_width=*/true);
        Tape tape;
        TapeScope scope(tape);
        Tensor loss = sas->bpr_loss(batch, pos, neg, /*train=*/true, &dropout_rng);
        meter.add(descend(loss, tape, opt, next_lr()), n_terms);
      }
      return meter.mean();
    };
  } else if (kind == "bert4rec") {
    run_epoch = [=, &train_sessions, &order_rng, &sample_rng, &dropout_rng, &opt,
                 model = model.get()]() {
      auto order = shuffled_indices(train_sessions.size(), order_rng);
      LossMeter meter;
      auto* bert = static_cast<BertModel*>(model);
      const std::int32_t mask_tok = bert->indexer().mask_token();
      const std::int64_t s_width = l_max;
      for (std::size_t at = 0; at < order.size(); at += bsz) {
        std::size_t end = std::min(order.size(), at + bsz);
        std::size_t b = end - at;
        std::vector<std::vector<std::int32_t>> masked_seqs;
        masked_seqs.reserve(b);
        std::vector<std::int32_t> flat_positions;
        std::vector<std::int32_t> targets;
        for (std::size_t r = 0; r < b; ++r) {
          const auto& s = train_sessions[order[at + r]];
          // Truncate to the window first so masked positions survive packing.
          std::size_t start = s.size() > static_cast<std::size_t>(s_width)
                                  ? s.size() - static_cast<std::size_t>(s_width)
                                  : 0;
          std::span<const std::int32_t> window(s.data() + start, s.size() - start);
          ClozeResult cloze =
              cloze_mask(window, cfg.mask_prob, mask_tok, sample_rng);
          std::int64_t n = static_cast<std::int64_t>(cloze.masked.size());
          for (std::size_t m = 0; m < cloze.positions.size(); ++m) {
            std::int64_t col = s_width - n + cloze.positions[m];
            flat_positions.push_back(static_cast<std::int32_t>(
                static_cast<std::int64_t>(r) * s_width + col));
            targets.push_back(cloze.targets[m]);
          }
          masked_seqs.push_back(std::move(cloze.masked));
        }
        TokenBatch batch = pack_left_padded(masked_seqs, s_width, /*fixed_width=*/true);
        Tape tape;
        TapeScope scope(tape);
        Tensor loss =
            bert->cloze_loss(batch, flat_positions, targets, /*train=*/true, &dropout_rng);
        meter.add(descend(loss, tape, opt, next_lr()),
                  static_cast<double>(targets.size()));
      }
      return meter.mean();
    };
  } else {
    throw Error("train: unknown model kind '" + kind + "'");
  }

  EarlyStopper stopper(cfg.patience);
  std::vector<std::vector<double>> best_values;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    double r3 = 0.0;
    try {
      epoch_loss = run_epoch();
      EvalReport rep = evaluate(*model, val_sessions, eval_cfg);
      r3 = rep.recall_at(3);
    } catch (const NumericError&) {
      manifest.diverged = true;
      manifest.diverged_epoch = epoch;
      break;
    }
    manifest.train_loss.push_back(epoch_loss);
    manifest.val_recall3.push_back(r3);
    manifest.epochs_run = epoch;
    bool stop = stopper.observe(r3);
    if (stopper.best_epoch() == epoch) {
      best_values.clear();
      for (const Tensor& p : params) best_values.push_back(p.data());
    }
    if (stop) break;
  }

  manifest.best_epoch = stopper.best_epoch();
  if (manifest.best_epoch == 0) {
    // Diverged before any epoch finished; nothing usable to return.
    return {nullptr, std::move(manifest)};
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i].data() = best_values[i];
  }
  return {std::move(model), std::move(manifest)};
}

}  // namespace seqrec
