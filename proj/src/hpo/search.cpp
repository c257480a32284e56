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

#include "seqrec/hpo/search.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <utility>

#include "seqrec/common.hpp"

namespace seqrec {

namespace {

std::vector<nlohmann::json> int_grid(int lo, int hi, int step) {
  std::vector<nlohmann::json> v;
  for (int x = lo; x <= hi; x += step) v.emplace_back(x);
  return v;
}

// 0.10 .. 0.50 in steps of 0.05, both endpoints included.
std::vector<nlohmann::json> dropout_grid() {
  std::vector<nlohmann::json> v;
  for (int i = 2; i <= 10; ++i) v.emplace_back(static_cast<double>(i) / 20.0);
  return v;
}

ParamSpace transformer_space() {
  return {
      {"heads", int_grid(1, 8, 1)},
      {"layers", int_grid(1, 6, 1)},
      {"head_dim", int_grid(8, 32, 1)},
      {"dropout", dropout_grid()},
      {"nonlinearity", {nlohmann::json("relu"), nlohmann::json("tanh")}},
  };
}

}  // namespace

ParamSpace param_space(const std::string& kind) {
  if (kind == "mlp") {
    return {
        {"hidden_size", int_grid(16, 256, 16)},
        {"hidden_layers", int_grid(1, 3, 1)},
    };
  }
  if (kind == "gru") {
    return {
        {"emb_size", int_grid(16, 64, 16)},
        {"cell_size", int_grid(16, 256, 16)},
        {"layers", int_grid(1, 2, 1)},
        {"dropout", dropout_grid()},
    };
  }
  if (kind == "narm") {
    return {
        {"emb_size", int_grid(16, 64, 16)},
        {"enc_size", int_grid(16, 256, 16)},
        {"enc_layers", int_grid(1, 2, 1)},
        {"ctx_dropout", dropout_grid()},
        {"emb_dropout", dropout_grid()},
    };
  }
  if (kind == "sasrec" || kind == "bert4rec") return transformer_space();
  if (kind == "lr" || kind == "pop" || kind == "markov") return {};
  throw Error("hpo: unknown model kind '" + kind + "'");
}

nlohmann::json sample_config(const ParamSpace& space, Rng& rng) {
  nlohmann::json config = nlohmann::json::object();
  for (const GridDim& dim : space) {
    require(!dim.values.empty(), "hpo: empty grid dimension " + dim.name);
    std::size_t idx = static_cast<std::size_t>(
        rng.next_below(static_cast<std::uint64_t>(dim.values.size())));
    config[dim.name] = dim.values[idx];
  }
  return config;
}

nlohmann::json SearchResult::summary_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["master_seed"] = master_seed;
  j["trials"] = static_cast<int>(trials.size());
  nlohmann::ordered_json space_json = nlohmann::ordered_json::array();
  for (const GridDim& dim : space) {
    nlohmann::ordered_json d;
    d["name"] = dim.name;
    d["values"] = dim.values;
    space_json.push_back(std::move(d));
  }
  j["space"] = std::move(space_json);
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  for (const TrialOutcome& t : trials) {
    nlohmann::ordered_json r;
    r["trial"] = t.trial_id;
    r["seed"] = t.seed;
    r["config"] = t.config;
    r["val_recall3"] = t.val_recall3;
    r["diverged"] = t.manifest.diverged;
    r["best_epoch"] = t.manifest.best_epoch;
    r["epochs_run"] = t.manifest.epochs_run;
    results.push_back(std::move(r));
  }
  j["results"] = std::move(results);
  j["best_trial"] = best_trial;
  j["test"] = test_report.to_json(kind);
  return j;
}

SearchResult run_search(const std::string& kind, const SearchOptions& opts,
                        const ItemIndexer& indexer,
                        const std::vector<std::vector<std::int32_t>>& train_sessions,
                        const std::vector<std::vector<std::int32_t>>& val_sessions,
                        const std::vector<std::vector<std::int32_t>>& test_sessions) {
  require(opts.trials >= 1, "hpo: trials must be at least 1");
  require(opts.jobs >= 1, "hpo: jobs must be at least 1");

  SearchResult out;
  out.kind = kind;
  out.space = param_space(kind);
  out.master_seed = opts.master_seed;
  out.trials.resize(static_cast<std::size_t>(opts.trials));

  // Configs are drawn up front from the master stream so the sampled points
  // do not depend on scheduling.
  Rng master(opts.master_seed);
  for (int t = 0; t < opts.trials; ++t) {
    TrialOutcome& trial = out.trials[static_cast<std::size_t>(t)];
    trial.trial_id = t;
    trial.config = sample_config(out.space, master);
    trial.seed = Rng::derive(opts.master_seed, static_cast<std::uint64_t>(t) + 1);
  }

  std::vector<std::unique_ptr<Ranker>> models(out.trials.size());
  std::vector<std::exception_ptr> errors(out.trials.size());
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int t = next.fetch_add(1);
      if (t >= opts.trials) return;
      auto idx = static_cast<std::size_t>(t);
      try {
        TrainConfig cfg = opts.base;
        cfg.seed = out.trials[idx].seed;
        TrainResult res = train_model(kind, out.trials[idx].config, cfg, indexer,
                                      train_sessions, val_sessions);
        out.trials[idx].manifest = std::move(res.manifest);
        if (out.trials[idx].manifest.best_epoch > 0) {
          out.trials[idx].val_recall3 =
              out.trials[idx]
                  .manifest
                  .val_recall3[static_cast<std::size_t>(out.trials[idx].manifest.best_epoch) - 1];
        }
        models[idx] = std::move(res.model);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  int n_workers = std::min(opts.jobs, opts.trials);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  int best = -1;
  for (int t = 0; t < opts.trials; ++t) {
    const TrialOutcome& trial = out.trials[static_cast<std::size_t>(t)];
    if (trial.manifest.best_epoch == 0) continue;  // nothing usable
    if (best < 0 ||
        trial.val_recall3 > out.trials[static_cast<std::size_t>(best)].val_recall3) {
      best = t;
    }
  }
  if (best < 0) throw DivergenceError("hpo: every trial diverged before an epoch finished");
  out.best_trial = best;
  out.best_model = std::move(models[static_cast<std::size_t>(best)]);
  out.test_report = evaluate(*out.best_model, test_sessions, EvalConfig{});
  return out;
}

}  // namespace seqrec
