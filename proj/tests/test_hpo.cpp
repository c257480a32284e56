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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "seqrec/common.hpp"
#include "seqrec/hpo/search.hpp"
#include "seqrec/models/indexer.hpp"
#include "seqrec/rng.hpp"

using namespace seqrec;

namespace {

const GridDim& dim_of(const ParamSpace& space, const std::string& name) {
  for (const GridDim& d : space) {
    if (d.name == name) return d;
  }
  REQUIRE_MESSAGE(false, "missing dimension " << name);
  static GridDim unreachable;
  return unreachable;
}

std::vector<int> int_values(const GridDim& d) {
  std::vector<int> v;
  for (const auto& j : d.values) v.push_back(j.get<int>());
  return v;
}

std::vector<std::vector<std::int32_t>> cyclic_sessions(std::size_t count,
                                                       std::int32_t n_items,
                                                       std::size_t length,
                                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::int32_t>> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::int32_t t = static_cast<std::int32_t>(
        rng.next_below(static_cast<std::uint64_t>(n_items)) + 1);
    std::vector<std::int32_t> s;
    for (std::size_t j = 0; j < length; ++j) {
      s.push_back(t);
      t = t % n_items + 1;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Search grids.
// ---------------------------------------------------------------------------

TEST_CASE("feed-forward grid spans width and depth") {
  ParamSpace space = param_space("mlp");
  REQUIRE(space.size() == 2);
  auto hidden = int_values(dim_of(space, "hidden_size"));
  REQUIRE(hidden.size() == 16);
  CHECK(hidden.front() == 16);
  CHECK(hidden.back() == 256);
  for (std::size_t i = 1; i < hidden.size(); ++i) CHECK(hidden[i] - hidden[i - 1] == 16);
  CHECK(int_values(dim_of(space, "hidden_layers")) == std::vector<int>{1, 2, 3});
}

TEST_CASE("recurrent grid spans embedding, cell, depth, and dropout") {
  ParamSpace space = param_space("gru");
  REQUIRE(space.size() == 4);
  CHECK(int_values(dim_of(space, "emb_size")) == std::vector<int>{16, 32, 48, 64});
  auto cell = int_values(dim_of(space, "cell_size"));
  REQUIRE(cell.size() == 16);
  CHECK(cell.front() == 16);
  CHECK(cell.back() == 256);
  CHECK(int_values(dim_of(space, "layers")) == std::vector<int>{1, 2});
  const GridDim& drop = dim_of(space, "dropout");
  REQUIRE(drop.values.size() == 9);
  for (int i = 2; i <= 10; ++i) {
    CHECK(drop.values[static_cast<std::size_t>(i - 2)].get<double>() ==
          doctest::Approx(i / 20.0));
  }
}

TEST_CASE("attention-encoder grid is shared by both attention models") {
  for (const std::string kind : {"sasrec", "bert4rec"}) {
    CAPTURE(kind);
    ParamSpace space = param_space(kind);
    REQUIRE(space.size() == 5);
    auto heads = int_values(dim_of(space, "heads"));
    CHECK(heads.front() == 1);
    CHECK(heads.back() == 8);
    CHECK(heads.size() == 8);
    auto layers = int_values(dim_of(space, "layers"));
    CHECK(layers.front() == 1);
    CHECK(layers.back() == 6);
    auto hd = int_values(dim_of(space, "head_dim"));
    CHECK(hd.front() == 8);
    CHECK(hd.back() == 32);
    CHECK(hd.size() == 25);
    CHECK(dim_of(space, "dropout").values.size() == 9);
    const GridDim& nl = dim_of(space, "nonlinearity");
    REQUIRE(nl.values.size() == 2);
    CHECK(nl.values[0] == "relu");
    CHECK(nl.values[1] == "tanh");
  }
}

TEST_CASE("context-encoder grid has independent dropout dimensions") {
  ParamSpace space = param_space("narm");
  REQUIRE(space.size() == 5);
  CHECK(int_values(dim_of(space, "emb_size")) == std::vector<int>{16, 32, 48, 64});
  CHECK(int_values(dim_of(space, "enc_size")).size() == 16);
  CHECK(int_values(dim_of(space, "enc_layers")) == std::vector<int>{1, 2});
  CHECK(dim_of(space, "ctx_dropout").values.size() == 9);
  CHECK(dim_of(space, "emb_dropout").values.size() == 9);
}

TEST_CASE("untunable kinds get an empty space; unknown kinds are an error") {
  CHECK(param_space("pop").empty());
  CHECK(param_space("markov").empty());
  CHECK(param_space("lr").empty());
  CHECK_THROWS_AS(param_space("boosted_trees"), Error);
}

// ---------------------------------------------------------------------------
// Config sampling.
// ---------------------------------------------------------------------------

TEST_CASE("sampled configs always lie on the grid") {
  ParamSpace space = param_space("gru");
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    nlohmann::json c = sample_config(space, rng);
    REQUIRE(c.size() == space.size());
    for (const GridDim& d : space) {
      REQUIRE(c.contains(d.name));
      bool on_grid = std::any_of(d.values.begin(), d.values.end(),
                                 [&](const nlohmann::json& v) { return v == c[d.name]; });
      CHECK(on_grid);
    }
  }
}

TEST_CASE("sampling is deterministic and uses the stream in order") {
  ParamSpace space = param_space("sasrec");
  Rng a(32), b(32);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_config(space, a) == sample_config(space, b));
  }
}

TEST_CASE("a singleton dimension always samples its only value") {
  ParamSpace space{{"alpha", {nlohmann::json(7)}}};
  Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_config(space, rng)["alpha"] == 7);
  }
  ParamSpace empty_dim{{"alpha", {}}};
  CHECK_THROWS_AS(sample_config(empty_dim, rng), Error);
}

TEST_CASE("binary dimensions are drawn roughly uniformly") {
  ParamSpace space = param_space("gru");
  Rng rng(34);
  int ones = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (sample_config(space, rng)["layers"] == 1) ++ones;
  }
  CHECK(static_cast<double>(ones) / draws == doctest::Approx(0.5).epsilon(0.04));
}

// ---------------------------------------------------------------------------
// End-to-end random search.
// ---------------------------------------------------------------------------

TEST_CASE("search selects the best validation score and evaluates it on test") {
  ItemIndexer idx(std::vector<std::int32_t>{1, 2, 3, 4, 5});
  auto train = cyclic_sessions(40, 5, 6, 90);
  auto val = cyclic_sessions(10, 5, 6, 91);
  auto test = cyclic_sessions(10, 5, 6, 92);
  SearchOptions opts;
  opts.trials = 3;
  opts.master_seed = 77;
  opts.base.max_seq_len = 6;
  opts.base.max_epochs = 1;
  opts.base.batch_size = 16;
  SearchResult r = run_search("mlp", opts, idx, train, val, test);
  REQUIRE(r.trials.size() == 3);
  REQUIRE(r.best_trial >= 0);
  REQUIRE(r.best_model != nullptr);
  CHECK(r.kind == "mlp");
  CHECK(r.master_seed == 77);
  double best_score = r.trials[static_cast<std::size_t>(r.best_trial)].val_recall3;
  for (const TrialOutcome& t : r.trials) {
    CHECK(best_score >= t.val_recall3);
    CHECK(t.seed == Rng::derive(77, static_cast<std::uint64_t>(t.trial_id) + 1));
    CHECK(t.manifest.kind == "mlp");
    CHECK(t.config == t.manifest.hyper);
  }
  CHECK(r.test_report.events > 0);

  auto j = r.summary_json();
  CHECK(j["kind"] == "mlp");
  CHECK(j["master_seed"] == 77);
  CHECK(j["trials"] == 3);
  REQUIRE(j["results"].size() == 3);
  CHECK(j["results"][0]["trial"] == 0);
  CHECK(j["results"][1]["config"] == r.trials[1].config);
  CHECK(j["best_trial"] == r.best_trial);
  CHECK(j["test"]["model"] == "mlp");
  CHECK(j["space"].size() == 2);
}

TEST_CASE("parallel search reproduces the sequential result exactly") {
  ItemIndexer idx(std::vector<std::int32_t>{1, 2, 3, 4, 5});
  auto train = cyclic_sessions(30, 5, 5, 93);
  auto val = cyclic_sessions(8, 5, 5, 94);
  auto test = cyclic_sessions(8, 5, 5, 95);
  SearchOptions seq;
  seq.trials = 4;
  seq.jobs = 1;
  seq.master_seed = 11;
  seq.base.max_seq_len = 5;
  seq.base.max_epochs = 1;
  seq.base.batch_size = 16;
  SearchOptions par = seq;
  par.jobs = 4;
  SearchResult a = run_search("mlp", seq, idx, train, val, test);
  SearchResult b = run_search("mlp", par, idx, train, val, test);
  CHECK(a.summary_json().dump() == b.summary_json().dump());
}

TEST_CASE("ties between equal trials resolve to the earliest one") {
  // The counting baseline has no hyperparameters, so all trials coincide.
  ItemIndexer idx(std::vector<std::int32_t>{1, 2, 3, 4, 5});
  auto train = cyclic_sessions(20, 5, 5, 96);
  auto val = cyclic_sessions(6, 5, 5, 97);
  auto test = cyclic_sessions(6, 5, 5, 98);
  SearchOptions opts;
  opts.trials = 3;
  opts.base.max_seq_len = 5;
  SearchResult r = run_search("markov", opts, idx, train, val, test);
  CHECK(r.best_trial == 0);
  CHECK(r.trials[0].val_recall3 == r.trials[2].val_recall3);
}

TEST_CASE("search options are validated") {
  ItemIndexer idx(std::vector<std::int32_t>{1, 2, 3});
  std::vector<std::vector<std::int32_t>> s{{1, 2}, {2, 3}};
  SearchOptions bad;
  bad.trials = 0;
  bad.base.max_seq_len = 4;
  CHECK_THROWS_AS(run_search("pop", bad, idx, s, s, s), Error);
  SearchOptions bad_jobs;
  bad_jobs.jobs = 0;
  bad_jobs.base.max_seq_len = 4;
  CHECK_THROWS_AS(run_search("pop", bad_jobs, idx, s, s, s), Error);
}
