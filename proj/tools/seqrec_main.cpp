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

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "seqrec/common.hpp"
#include "seqrec/data/kendall.hpp"
#include "seqrec/data/parser.hpp"
#include "seqrec/data/plot.hpp"
#include "seqrec/data/preprocess.hpp"
#include "seqrec/eval/evaluate.hpp"
#include "seqrec/hpo/search.hpp"
#include "seqrec/models/checkpoint.hpp"
#include "seqrec/models/indexer.hpp"
#include "seqrec/rng.hpp"
#include "seqrec/synth/generate.hpp"
#include "seqrec/train/batching.hpp"
#include "seqrec/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace seqrec;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require_data(out.good(), "cannot open " + path.string() + " for writing");
  out << text;
  require_data(out.good(), "write failed for " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require_data(in.good(), "cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

// Every command records how it was invoked next to its outputs.
void write_invocation(const std::string& out_dir, const std::string& command,
                      const std::vector<std::string>& args, std::uint64_t seed) {
  ordered_json j;
  j["command"] = command;
  j["args"] = args;
  j["seed"] = seed;
  j["version"] = seqrec::kVersion;
  j["rng_algorithm"] = Rng::kAlgorithm;
  write_json_file(fs::path(out_dir) / "invocation.json", j);
}

std::string ensure_out_dir(const std::string& out) {
  fs::create_directories(out);
  return out;
}

Dataset load_data(const std::string& dir) {
  require_data(fs::is_directory(dir), "no such dataset directory: " + dir);
  return load_dataset_dir(dir);
}

std::vector<std::vector<std::int32_t>> load_split_sessions(const fs::path& dir,
                                                           const ItemIndexer& indexer) {
  require_data(fs::is_directory(dir), "no such split directory: " + dir.string());
  Dataset d = load_dataset_dir(dir.string());
  return tokenize_sessions(d.matches, indexer);
}

// Shared hyperparameter flags; -1 sentinels resolve to each model's default
// configuration (the strongest published one).
struct HyperFlags {
  int emb = -1;
  int cell = -1;
  int layers = -1;
  double dropout = -1.0;
  int hidden = -1;
  int hidden_layers = -1;
  int enc = -1;
  int enc_layers = -1;
  double ctx_dropout = -1.0;
  double emb_dropout = -1.0;
  int heads = -1;
  int head_dim = -1;
  std::string nonlinearity;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--emb", emb, "Embedding size (gru, narm)");
    cmd->add_option("--cell", cell, "Recurrent cell size (gru)");
    cmd->add_option("--layers", layers, "Layer count (gru, sasrec, bert4rec)");
    cmd->add_option("--dropout", dropout, "Dropout rate (gru, sasrec, bert4rec)");
    cmd->add_option("--hidden", hidden, "Hidden width (mlp)");
    cmd->add_option("--hidden-layers", hidden_layers, "Hidden layer count (mlp)");
    cmd->add_option("--enc", enc, "Encoder size (narm)");
    cmd->add_option("--enc-layers", enc_layers, "Encoder layer count (narm)");
    cmd->add_option("--ctx-dropout", ctx_dropout, "Context dropout (narm)");
    cmd->add_option("--emb-dropout", emb_dropout, "Embedding dropout (narm)");
    cmd->add_option("--heads", heads, "Attention heads (sasrec, bert4rec)");
    cmd->add_option("--head-dim", head_dim, "Per-head size (sasrec, bert4rec)");
    cmd->add_option("--nonlinearity", nonlinearity,
                    "Feed-forward nonlinearity: relu or tanh (sasrec, bert4rec)");
  }

  json build(const std::string& kind) const {
    auto pick_i = [](int flag, int fallback) { return flag >= 0 ? flag : fallback; };
    auto pick_d = [](double flag, double fallback) {
      return flag >= 0.0 ? flag : fallback;
    };
    auto pick_s = [](const std::string& flag, const char* fallback) {
      return flag.empty() ? std::string(fallback) : flag;
    };
    if (kind == "gru") {
      return json{{"emb_size", pick_i(emb, 64)},
                  {"cell_size", pick_i(cell, 128)},
                  {"layers", pick_i(layers, 2)},
                  {"dropout", pick_d(dropout, 0.1)}};
    }
    if (kind == "narm") {
      return json{{"emb_size", pick_i(emb, 32)},
                  {"enc_size", pick_i(enc, 80)},
                  {"enc_layers", pick_i(enc_layers, 1)},
                  {"ctx_dropout", pick_d(ctx_dropout, 0.2)},
                  {"emb_dropout", pick_d(emb_dropout, 0.15)}};
    }
    if (kind == "mlp") {
      return json{{"hidden_size", pick_i(hidden, 256)},
                  {"hidden_layers", pick_i(hidden_layers, 3)}};
    }
    if (kind == "sasrec") {
      return json{{"heads", pick_i(heads, 7)},
                  {"layers", pick_i(layers, 4)},
                  {"head_dim", pick_i(head_dim, 13)},
                  {"dropout", pick_d(dropout, 0.1)},
                  {"nonlinearity", pick_s(nonlinearity, "tanh")}};
    }
    if (kind == "bert4rec") {
      return json{{"heads", pick_i(heads, 7)},
                  {"layers", pick_i(layers, 5)},
                  {"head_dim", pick_i(head_dim, 17)},
                  {"dropout", pick_d(dropout, 0.1)},
                  {"nonlinearity", pick_s(nonlinearity, "relu")}};
    }
    if (kind == "lr" || kind == "pop" || kind == "markov") return json::object();
    throw DataError("unknown model kind '" + kind + "'");
  }
};

// Training-schedule flags shared by `train` and `search`.
struct ScheduleFlags {
  double lr = 1e-3;
  int epochs = 25;
  int patience = 3;
  std::int64_t batch = 128;
  std::int64_t warmup = 10000;
  double mask_prob = 0.2;
  std::int64_t max_seq_len = 0;  // 0 = derive from coverage
  double coverage = 0.995;
  bool gru_sequence_mode = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lr", lr, "Learning rate");
    cmd->add_option("--epochs", epochs, "Maximum training epochs");
    cmd->add_option("--patience", patience, "Early-stopping patience (epochs)");
    cmd->add_option("--batch", batch, "Batch size");
    cmd->add_option("--warmup", warmup, "Warmup steps (bert4rec)");
    cmd->add_option("--mask-prob", mask_prob, "Cloze mask probability (bert4rec)");
    cmd->add_option("--max-seq-len", max_seq_len,
                    "Input window length; 0 derives it from --coverage");
    cmd->add_option("--coverage", coverage,
                    "Session-length coverage used to derive the window");
    cmd->add_flag("--gru-sequence-mode", gru_sequence_mode,
                  "Train the recurrent model per-session instead of per-prefix");
  }

  TrainConfig build(std::uint64_t seed, std::int64_t l_max) const {
    TrainConfig cfg;
    cfg.lr = lr;
    cfg.max_epochs = epochs;
    cfg.patience = patience;
    cfg.batch_size = batch;
    cfg.warmup_steps = warmup;
    cfg.mask_prob = mask_prob;
    cfg.max_seq_len = l_max;
    cfg.seed = seed;
    cfg.gru_sequence_mode = gru_sequence_mode;
    return cfg;
  }
};

json stats_to_json(const DatasetStats& st, std::int64_t l_max, double coverage) {
  ordered_json j;
  j["n_matches"] = st.n_matches;
  j["n_sessions"] = st.n_sessions;
  j["n_items_observed"] = st.n_items_observed;
  j["n_heroes_observed"] = st.n_heroes_observed;
  j["mean_session_length"] = st.mean_session_length;
  j["std_session_length"] = st.std_session_length;
  j["coverage"] = coverage;
  j["l_max"] = l_max;
  ordered_json items = ordered_json::object();
  for (const auto& [id, n] : st.item_freq) items[std::to_string(id)] = n;
  j["item_freq"] = std::move(items);
  ordered_json heroes = ordered_json::object();
  for (const auto& [id, n] : st.hero_freq) heroes[std::to_string(id)] = n;
  j["hero_freq"] = std::move(heroes);
  return j;
}

EvalReport eval_report_from_json(const json& j) {
  require_data(j.contains("events") && j.contains("metrics"),
               "eval report missing events/metrics");
  EvalReport r;
  r.events = j.at("events").get<std::int64_t>();
  std::vector<int> ks;
  for (const auto& [key, value] : j.at("metrics").items()) {
    if (key.rfind("recall@", 0) == 0) ks.push_back(std::stoi(key.substr(7)));
    (void)value;
  }
  std::sort(ks.begin(), ks.end());
  r.ks = ks;
  for (int k : ks) {
    r.recall.push_back(j.at("metrics").at("recall@" + std::to_string(k)).get<double>());
    r.ndcg.push_back(j.at("metrics").at("ndcg@" + std::to_string(k)).get<double>());
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw_args;
  for (int i = 1; i < argc; ++i) raw_args.emplace_back(argv[i]);

  CLI::App app{"Sequential item recommendation toolkit"};
  app.set_version_flag("--version", std::string("seqrec ") + seqrec::kVersion);
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- synth ----------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic match corpus");
  SynthSpec synth_spec;
  std::string synth_out = ".";
  synth_cmd->add_option("--matches", synth_spec.n_matches, "Number of matches");
  synth_cmd->add_option("--items", synth_spec.n_items, "Number of items");
  synth_cmd->add_option("--heroes", synth_spec.n_heroes, "Number of heroes");
  synth_cmd->add_option("--sharpness", synth_spec.transition_sharpness,
                        "Transition-row concentration (0 = uniform)");
  synth_cmd->add_option("--consumable-rate", synth_spec.consumable_rate,
                        "Fraction of items marked consumable");
  synth_cmd->add_option("--mean-len", synth_spec.mean_ls, "Target mean session length");
  synth_cmd->add_option("--std-len", synth_spec.std_ls, "Target session length spread");
  synth_cmd->add_option("--mean-duration", synth_spec.mean_duration_s,
                        "Mean match duration (seconds)");
  synth_cmd->add_option("--std-duration", synth_spec.std_duration_s,
                        "Match duration spread (seconds)");
  synth_cmd->add_option("--seed", synth_spec.seed, "Generator seed");
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->callback([&] {
    SynthResult res = generate(synth_spec);
    ensure_out_dir(synth_out);
    save_dataset_dir(synth_out, res.dataset);
    res.oracle.save((fs::path(synth_out) / "oracle.json").string());
    write_invocation(synth_out, "synth", raw_args, synth_spec.seed);
    std::cout << "wrote " << res.dataset.matches.size() << " matches ("
              << res.dataset.n_sessions() << " sessions) to " << synth_out << "\n";
  });

  // ---- ingest ---------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse and validate a match corpus");
  std::string ingest_data, ingest_out = ".";
  bool ingest_strict = false;
  std::uint64_t ingest_seed = 1;
  ingest_cmd->add_option("--data", ingest_data, "Input dataset directory")->required();
  ingest_cmd->add_flag("--strict", ingest_strict, "Abort on the first malformed line");
  ingest_cmd->add_option("--seed", ingest_seed, "Recorded seed (unused)");
  ingest_cmd->add_option("--out", ingest_out, "Output directory");
  ingest_cmd->callback([&] {
    ParseOptions opts;
    opts.strict = ingest_strict;
    ParseReport report;
    require_data(fs::is_directory(ingest_data), "no such dataset directory: " + ingest_data);
    Dataset d = load_dataset_dir(ingest_data, opts, &report);
    ensure_out_dir(ingest_out);
    save_dataset_dir(ingest_out, d);
    ordered_json j;
    j["lines_total"] = report.lines_total;
    j["matches_parsed"] = report.matches_parsed;
    ordered_json skipped = ordered_json::array();
    for (const auto& issue : report.skipped_lines) {
      skipped.push_back({{"line", issue.line}, {"message", issue.message}});
    }
    j["skipped_lines"] = std::move(skipped);
    ordered_json invalid = ordered_json::array();
    for (const auto& flag : report.invalid_matches) {
      invalid.push_back({{"match_id", flag.match_id}, {"reason", flag.reason}});
    }
    j["invalid_matches"] = std::move(invalid);
    write_json_file(fs::path(ingest_out) / "parse_report.json", j);
    write_invocation(ingest_out, "ingest", raw_args, ingest_seed);
    std::cout << "parsed " << report.matches_parsed << " matches ("
              << report.invalid_matches.size() << " invalid, "
              << report.skipped_lines.size() << " skipped lines)\n";
  });

  // ---- stats ----------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  std::string stats_data, stats_out = ".";
  bool stats_preprocess = false;
  std::string stats_mode = "ranked_all_pick";
  double stats_trim = 0.025, stats_coverage = 0.995;
  std::uint64_t stats_seed = 1;
  stats_cmd->add_option("--data", stats_data, "Dataset directory")->required();
  stats_cmd->add_flag("--preprocess", stats_preprocess,
                      "Apply filtering/trimming before computing statistics");
  stats_cmd->add_option("--mode", stats_mode, "Game mode kept by --preprocess");
  stats_cmd->add_option("--trim", stats_trim, "Duration trim quantile for --preprocess");
  stats_cmd->add_option("--coverage", stats_coverage,
                        "Coverage for the reported session-length window");
  stats_cmd->add_option("--seed", stats_seed, "Recorded seed (unused)");
  stats_cmd->add_option("--out", stats_out, "Output directory");
  stats_cmd->callback([&] {
    Dataset d = load_data(stats_data);
    if (stats_preprocess) {
      PreprocessOptions opts;
      opts.mode_filter = stats_mode;
      opts.trim_quantile = stats_trim;
      d = preprocess(d, opts);
    }
    DatasetStats st = compute_stats(d);
    std::vector<std::int64_t> lengths;
    for (const auto& m : d.matches) {
      for (const auto& s : m.sessions) {
        lengths.push_back(static_cast<std::int64_t>(s.purchases.size()));
      }
    }
    std::int64_t l_max =
        lengths.empty() ? 0 : compute_l_max_from_lengths(std::move(lengths), stats_coverage);
    ensure_out_dir(stats_out);
    json j = stats_to_json(st, l_max, stats_coverage);
    write_json_file(fs::path(stats_out) / "stats.json", j);
    write_invocation(stats_out, "stats", raw_args, stats_seed);
    std::cout << j.dump(2) << "\n";
  });

  // ---- split ----------------------------------------------------------
  auto* split_cmd = app.add_subcommand("split", "Chronological train/val/test split");
  std::string split_data, split_out = ".";
  SplitSpec split_spec{0.94, 0.01, 0.05};
  bool split_no_preprocess = false;
  std::string split_mode = "ranked_all_pick";
  double split_trim = 0.025;
  std::uint64_t split_seed = 1;
  split_cmd->add_option("--data", split_data, "Dataset directory")->required();
  split_cmd->add_option("--train", split_spec.train_frac, "Training fraction");
  split_cmd->add_option("--val", split_spec.val_frac, "Validation fraction");
  split_cmd->add_option("--test", split_spec.test_frac, "Test fraction");
  split_cmd->add_flag("--no-preprocess", split_no_preprocess,
                      "Split the corpus as-is (skip filtering/trimming)");
  split_cmd->add_option("--mode", split_mode, "Game mode kept by preprocessing");
  split_cmd->add_option("--trim", split_trim, "Duration trim quantile");
  split_cmd->add_option("--seed", split_seed, "Recorded seed (unused)");
  split_cmd->add_option("--out", split_out, "Output directory");
  split_cmd->callback([&] {
    Dataset d = load_data(split_data);
    if (!split_no_preprocess) {
      PreprocessOptions opts;
      opts.mode_filter = split_mode;
      opts.trim_quantile = split_trim;
      d = preprocess(d, opts);
    }
    Splits splits = split_chronological(d, split_spec);
    ensure_out_dir(split_out);
    save_dataset_dir((fs::path(split_out) / "train").string(), splits.train);
    save_dataset_dir((fs::path(split_out) / "val").string(), splits.val);
    save_dataset_dir((fs::path(split_out) / "test").string(), splits.test);
    RepresentativenessReport rep = validate_split_representativeness(d, splits.train);
    ordered_json j;
    j["n_matches"] = d.matches.size();
    j["boundary_train"] = splits.boundary_train;
    j["boundary_val"] = splits.boundary_val;
    ordered_json parts;
    auto part = [](const Dataset& p) {
      return ordered_json{{"matches", p.matches.size()}, {"sessions", p.n_sessions()}};
    };
    parts["train"] = part(splits.train);
    parts["val"] = part(splits.val);
    parts["test"] = part(splits.test);
    j["splits"] = std::move(parts);
    j["train_representativeness"] = {{"tau_items", rep.tau_items},
                                     {"tau_heroes", rep.tau_heroes},
                                     {"all_items_present", rep.all_items_present},
                                     {"all_heroes_present", rep.all_heroes_present}};
    write_json_file(fs::path(split_out) / "split_report.json", j);
    write_invocation(split_out, "split", raw_args, split_seed);
    std::cout << "split " << d.matches.size() << " matches at boundaries "
              << splits.boundary_train << "/" << splits.boundary_val << "\n";
  });

  // ---- train ----------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train one model on a prepared split");
  std::string train_model_kind, train_data, train_out = ".";
  HyperFlags train_hyper;
  ScheduleFlags train_sched;
  std::uint64_t train_seed = 1;
  train_cmd
      ->add_option("--model", train_model_kind,
                   "pop, markov, lr, mlp, gru, narm, sasrec, or bert4rec")
      ->required();
  train_cmd->add_option("--data", train_data, "Split directory (train/ + val/)")
      ->required();
  train_hyper.add_to(train_cmd);
  train_sched.add_to(train_cmd);
  train_cmd->add_option("--seed", train_seed, "Training seed");
  train_cmd->add_option("--out", train_out, "Output directory");
  train_cmd->callback([&] {
    Dataset train_set = load_data((fs::path(train_data) / "train").string());
    ItemIndexer indexer(train_set.items);
    auto train_sessions = tokenize_sessions(train_set.matches, indexer);
    auto val_sessions =
        load_split_sessions(fs::path(train_data) / "val", indexer);
    std::int64_t l_max = train_sched.max_seq_len > 0
                             ? train_sched.max_seq_len
                             : compute_l_max(train_sessions, train_sched.coverage);
    json hyper = train_hyper.build(train_model_kind);
    TrainConfig cfg = train_sched.build(train_seed, l_max);
    TrainResult res = train_model(train_model_kind, hyper, cfg, indexer,
                                  train_sessions, val_sessions);
    ensure_out_dir(train_out);
    write_json_file(fs::path(train_out) / "manifest.json", res.manifest.to_json());
    if (res.model) {
      save_model_checkpoint((fs::path(train_out) / "model.ckpt").string(), *res.model);
    }
    write_invocation(train_out, "train", raw_args, train_seed);
    if (res.manifest.diverged) {
      std::cout << "training diverged at epoch " << res.manifest.diverged_epoch
                << "; best epoch " << res.manifest.best_epoch << "\n";
      exit_code = 3;
      return;
    }
    std::cout << "trained " << train_model_kind << " for " << res.manifest.epochs_run
              << " epoch(s); best epoch " << res.manifest.best_epoch
              << " val recall@3 "
              << res.manifest.val_recall3[static_cast<std::size_t>(
                     res.manifest.best_epoch - 1)]
              << "\n";
  });

  // ---- eval -----------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  std::string eval_model_path, eval_data, eval_name, eval_out = ".";
  std::vector<int> eval_ks{1, 3};
  std::uint64_t eval_seed = 1;
  eval_cmd->add_option("--model", eval_model_path, "Checkpoint path")->required();
  eval_cmd->add_option("--data", eval_data, "Dataset directory to score")->required();
  eval_cmd->add_option("--ks", eval_ks, "Ranking cutoffs");
  eval_cmd->add_option("--name", eval_name, "Row label (defaults to the model kind)");
  eval_cmd->add_option("--seed", eval_seed, "Recorded seed (unused)");
  eval_cmd->add_option("--out", eval_out, "Output directory");
  eval_cmd->callback([&] {
    std::unique_ptr<Ranker> model = load_model_checkpoint(eval_model_path);
    Dataset d = load_data(eval_data);
    auto sessions = tokenize_sessions(d.matches, model->indexer());
    EvalConfig cfg;
    cfg.ks = eval_ks;
    EvalReport rep = evaluate(*model, sessions, cfg);
    ensure_out_dir(eval_out);
    std::string name = eval_name.empty() ? model->kind() : eval_name;
    json j = rep.to_json(name);
    write_json_file(fs::path(eval_out) / "eval.json", j);
    write_invocation(eval_out, "eval", raw_args, eval_seed);
    std::cout << j.dump(2) << "\n";
  });

  // ---- search ---------------------------------------------------------
  auto* search_cmd =
      app.add_subcommand("search", "Random hyperparameter search on a prepared split");
  std::string search_model_kind, search_data, search_out = ".";
  ScheduleFlags search_sched;
  int search_trials = 30, search_jobs = 1;
  std::uint64_t search_seed = 1;
  search_cmd
      ->add_option("--model", search_model_kind,
                   "mlp, gru, narm, sasrec, or bert4rec (others have no grid)")
      ->required();
  search_cmd->add_option("--data", search_data, "Split directory (train/ val/ test/)")
      ->required();
  search_cmd->add_option("--trials", search_trials, "Number of sampled configurations");
  search_cmd->add_option("--jobs", search_jobs, "Concurrent trials");
  search_sched.add_to(search_cmd);
  search_cmd->add_option("--seed", search_seed, "Master search seed");
  search_cmd->add_option("--out", search_out, "Output directory");
  search_cmd->callback([&] {
    Dataset train_set = load_data((fs::path(search_data) / "train").string());
    ItemIndexer indexer(train_set.items);
    auto train_sessions = tokenize_sessions(train_set.matches, indexer);
    auto val_sessions = load_split_sessions(fs::path(search_data) / "val", indexer);
    auto test_sessions = load_split_sessions(fs::path(search_data) / "test", indexer);
    std::int64_t l_max = search_sched.max_seq_len > 0
                             ? search_sched.max_seq_len
                             : compute_l_max(train_sessions, search_sched.coverage);
    SearchOptions opts;
    opts.trials = search_trials;
    opts.jobs = search_jobs;
    opts.master_seed = search_seed;
    opts.base = search_sched.build(search_seed, l_max);
    SearchResult res = run_search(search_model_kind, opts, indexer, train_sessions,
                                  val_sessions, test_sessions);
    ensure_out_dir(search_out);
    fs::create_directories(fs::path(search_out) / "trials");
    for (const TrialOutcome& t : res.trials) {
      char name[32];
      std::snprintf(name, sizeof(name), "trial_%03d.json", t.trial_id);
      write_json_file(fs::path(search_out) / "trials" / name, t.manifest.to_json());
    }
    write_json_file(fs::path(search_out) / "search.json", res.summary_json());
    save_model_checkpoint((fs::path(search_out) / "best_model.ckpt").string(),
                          *res.best_model);
    write_invocation(search_out, "search", raw_args, search_seed);
    std::cout << "best trial " << res.best_trial << " val recall@3 "
              << res.trials[static_cast<std::size_t>(res.best_trial)].val_recall3
              << " test recall@3 " << res.test_report.recall_at(3) << "\n";
  });

  // ---- plotdata -------------------------------------------------------
  auto* plot_cmd = app.add_subcommand("plotdata", "Binned series for plotting");
  std::string plot_data_dir, plot_series = "item_time", plot_out = ".";
  std::int32_t plot_item = 0;
  std::int64_t plot_bin = 60;
  int plot_window = 5;
  std::uint64_t plot_seed = 1;
  plot_cmd->add_option("--data", plot_data_dir, "Dataset directory")->required();
  plot_cmd->add_option("--series", plot_series,
                       "item_time, duration, or session_length");
  plot_cmd->add_option("--item", plot_item, "Item id (item_time series)");
  plot_cmd->add_option("--bin", plot_bin, "Bin width in seconds");
  plot_cmd->add_option("--window", plot_window, "Rolling-average window in bins");
  plot_cmd->add_option("--seed", plot_seed, "Recorded seed (unused)");
  plot_cmd->add_option("--out", plot_out, "Output directory");
  plot_cmd->callback([&] {
    Dataset d = load_data(plot_data_dir);
    PlotSeries series;
    if (plot_series == "item_time") {
      series = PlotSeries::kItemPurchaseTime;
    } else if (plot_series == "duration") {
      series = PlotSeries::kMatchDuration;
    } else if (plot_series == "session_length") {
      series = PlotSeries::kSessionLength;
    } else {
      throw DataError("unknown series '" + plot_series + "'");
    }
    auto points = plot_data(d, series, plot_item, plot_bin, plot_window);
    ensure_out_dir(plot_out);
    std::ofstream out(fs::path(plot_out) / "plot.csv", std::ios::binary);
    require_data(out.good(), "cannot open plot.csv for writing");
    write_plot_csv(out, points);
    require_data(out.good(), "write failed for plot.csv");
    out.close();
    write_invocation(plot_out, "plotdata", raw_args, plot_seed);
    std::cout << "wrote " << points.size() << " bins\n";
  });

  // ---- report ---------------------------------------------------------
  auto* report_cmd =
      app.add_subcommand("report", "Leaderboard CSV from evaluation reports");
  std::vector<std::string> report_inputs;
  std::string report_out = ".";
  std::uint64_t report_seed = 1;
  report_cmd->add_option("--inputs", report_inputs, "Evaluation report JSON files")
      ->required();
  report_cmd->add_option("--seed", report_seed, "Recorded seed (unused)");
  report_cmd->add_option("--out", report_out, "Output directory");
  report_cmd->callback([&] {
    std::vector<std::pair<std::string, EvalReport>> reports;
    for (const std::string& path : report_inputs) {
      json j = read_json_file(path);
      require_data(j.contains("model"), "eval report missing model name: " + path);
      reports.emplace_back(j.at("model").get<std::string>(), eval_report_from_json(j));
    }
    std::string csv = leaderboard_csv(std::move(reports));
    ensure_out_dir(report_out);
    write_text_file(fs::path(report_out) / "leaderboard.csv", csv);
    write_invocation(report_out, "report", raw_args, report_seed);
    std::cout << csv;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
