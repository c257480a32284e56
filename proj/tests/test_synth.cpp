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
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "seqrec/common.hpp"
#include "seqrec/data/parser.hpp"
#include "seqrec/data/preprocess.hpp"
#include "seqrec/synth/generate.hpp"

using namespace seqrec;

namespace {

SynthSpec small_spec(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_matches = 60;
  spec.n_items = 10;
  spec.n_heroes = 12;
  spec.mean_ls = 8.0;
  spec.std_ls = 2.0;
  spec.seed = seed;
  return spec;
}

// A hand-built two-item chain for exact oracle arithmetic.
TransitionOracle tiny_oracle() {
  TransitionOracle o;
  o.items = {101, 102};
  o.matrices[1] = {0.1, 0.9,   // after 101: 102 is most likely
                   0.8, 0.2};  // after 102: 101 is most likely
  o.rng_algorithm = "splitmix64";
  o.seed = 5;
  return o;
}

std::string corpus_bytes(const Dataset& d) {
  std::ostringstream out;
  write_matches(out, d);
  return out.str();
}

MatchRecord match_with_purchases(const std::vector<std::vector<std::int32_t>>& item_seqs) {
  MatchRecord m;
  m.match_id = 1;
  m.start_time = 100;
  m.duration_s = 1000;
  m.game_mode = "ranked_all_pick";
  int slot = 0;
  for (const auto& seq : item_seqs) {
    Session s;
    s.player_slot = slot++;
    s.hero_id = 1;
    s.team = Team::kRadiant;
    std::int32_t t = 0;
    for (std::int32_t id : seq) s.purchases.push_back({id, t += 5});
    m.sessions.push_back(std::move(s));
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator output structure.
// ---------------------------------------------------------------------------

TEST_CASE("generated corpora are deterministic in the seed") {
  SynthSpec spec = small_spec(21);
  SynthResult a = generate(spec);
  SynthResult b = generate(spec);
  CHECK(corpus_bytes(a.dataset) == corpus_bytes(b.dataset));
  CHECK(a.oracle.to_json().dump() == b.oracle.to_json().dump());

  SynthResult c = generate(small_spec(22));
  CHECK(corpus_bytes(a.dataset) != corpus_bytes(c.dataset));
}

TEST_CASE("generated matches have the advertised shape") {
  SynthSpec spec = small_spec(23);
  SynthResult r = generate(spec);
  REQUIRE(r.dataset.matches.size() == 60);
  std::int64_t prev_start = -1;
  for (const auto& m : r.dataset.matches) {
    CHECK(m.start_time > prev_start);
    prev_start = m.start_time;
    CHECK(m.game_mode == "ranked_all_pick");
    CHECK(!m.abandoned);
    CHECK(m.duration_s >= 300);
    CHECK(m.duration_s <= static_cast<std::int32_t>(
                              std::llround(spec.mean_duration_s + 4 * spec.std_duration_s)));
    REQUIRE(m.sessions.size() == 10);
    std::vector<bool> hero_used(static_cast<std::size_t>(spec.n_heroes) + 1, false);
    for (std::size_t slot = 0; slot < 10; ++slot) {
      const Session& s = m.sessions[slot];
      CHECK(s.player_slot == static_cast<std::int32_t>(slot));
      CHECK((s.team == (slot < 5 ? Team::kRadiant : Team::kDire)));
      REQUIRE(s.hero_id >= 1);
      REQUIRE(s.hero_id <= spec.n_heroes);
      CHECK(!hero_used[static_cast<std::size_t>(s.hero_id)]);  // distinct per match
      hero_used[static_cast<std::size_t>(s.hero_id)] = true;
      REQUIRE(s.purchases.size() >= 2);
      CHECK(s.purchases.size() <= static_cast<std::size_t>(std::llround(3 * spec.mean_ls)));
      std::int32_t prev_t = 0;
      for (const auto& p : s.purchases) {
        CHECK(p.t_s >= prev_t);  // purchase times are sorted
        prev_t = p.t_s;
        CHECK(p.t_s <= m.duration_s);
        CHECK(p.item_id >= 101);  // ids offset away from token indices
        CHECK(p.item_id <= 100 + spec.n_items);
      }
    }
  }
  // Vocabulary covers exactly the generated id range.
  CHECK(r.dataset.items.size() == static_cast<std::size_t>(spec.n_items));
  CHECK(r.dataset.items.contains(101));
  CHECK(r.dataset.items.contains(100 + spec.n_items));
  CHECK(!r.dataset.items.contains(100 + spec.n_items + 1));
  CHECK(r.dataset.heroes.size() == static_cast<std::size_t>(spec.n_heroes));
}

TEST_CASE("session lengths track the requested moments") {
  SynthSpec spec = small_spec(24);
  spec.n_matches = 300;
  SynthResult r = generate(spec);
  double sum = 0.0;
  double count = 0.0;
  for (const auto& m : r.dataset.matches) {
    for (const auto& s : m.sessions) {
      sum += static_cast<double>(s.purchases.size());
      count += 1.0;
    }
  }
  double mean = sum / count;
  CHECK(mean == doctest::Approx(spec.mean_ls).epsilon(0.05));
}

TEST_CASE("generated corpora survive the ingestion pipeline unchanged") {
  SynthSpec spec = small_spec(25);
  SynthResult r = generate(spec);
  // Round trip through the serialized form and the parser.
  std::string jsonl = corpus_bytes(r.dataset);
  std::istringstream in(jsonl);
  ParseReport report;
  Dataset parsed = parse_matches(in, r.dataset.items, r.dataset.heroes, {}, &report);
  CHECK(report.skipped_lines.empty());
  CHECK(report.invalid_matches.empty());
  for (const auto& m : parsed.matches) CHECK(m.valid());
  CHECK(corpus_bytes(parsed) == jsonl);

  // Filtering with trimming disabled keeps every match.
  PreprocessOptions opts;
  opts.trim_quantile = 0.0;
  Dataset kept = preprocess(parsed, opts);
  CHECK(corpus_bytes(kept) == jsonl);
}

// ---------------------------------------------------------------------------
// Oracle behavior.
// ---------------------------------------------------------------------------

TEST_CASE("oracle scores follow the planted row and rank ties by id") {
  TransitionOracle o = tiny_oracle();
  CHECK(o.scores_after(1, 101) == std::vector<double>{0.1, 0.9});
  CHECK(o.scores_after(1, 102) == std::vector<double>{0.8, 0.2});
  CHECK_THROWS_AS(o.scores_after(9, 101), Error);  // unknown hero
  CHECK_THROWS_AS(o.scores_after(1, 999), Error);  // unknown item

  std::vector<std::int32_t> prefix{102, 101};
  CHECK(o.rank(1, prefix) == std::vector<std::int32_t>{102, 101});

  TransitionOracle flat;
  flat.items = {101, 102, 103};
  flat.matrices[1] = std::vector<double>(9, 1.0 / 3.0);  // uniform rows
  std::vector<std::int32_t> p2{103};
  CHECK(flat.rank(1, p2) == std::vector<std::int32_t>{101, 102, 103});
}

TEST_CASE("oracle evaluation scores hand-countable events") {
  TransitionOracle o = tiny_oracle();
  // Session A: 101 -> 102 (rank 1), 102 -> 101 (rank 1).
  // Session B: 101 -> 101 (rank 2).
  std::vector<MatchRecord> matches{
      match_with_purchases({{101, 102, 101}, {101, 101}})};
  EvalReport r = evaluate_oracle(o, matches, EvalConfig{});
  CHECK(r.events == 3);
  CHECK(r.recall_at(1) == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall_at(3) == doctest::Approx(1.0));
  CHECK(r.ndcg_at(3) == doctest::Approx((1.0 + 1.0 + 1.0 / std::log2(3.0)) / 3.0));

  std::vector<MatchRecord> unknown{match_with_purchases({{101, 999}})};
  CHECK_THROWS_AS(evaluate_oracle(o, unknown, EvalConfig{}), DataError);
}

TEST_CASE("sharper transitions make the oracle more decisive") {
  SynthSpec soft = small_spec(26);
  soft.transition_sharpness = 0.5;
  SynthSpec hard = small_spec(26);
  hard.transition_sharpness = 12.0;
  SynthResult a = generate(soft);
  SynthResult b = generate(hard);
  double soft_r1 = evaluate_oracle(a.oracle, a.dataset.matches, EvalConfig{}).recall_at(1);
  double hard_r1 = evaluate_oracle(b.oracle, b.dataset.matches, EvalConfig{}).recall_at(1);
  CHECK(hard_r1 > soft_r1 + 0.1);
}

TEST_CASE("oracle files round-trip through json and disk") {
  namespace fs = std::filesystem;
  SynthResult r = generate(small_spec(27));
  TransitionOracle rebuilt = TransitionOracle::from_json(r.oracle.to_json());
  CHECK(rebuilt.items == r.oracle.items);
  CHECK(rebuilt.matrices == r.oracle.matrices);
  CHECK(rebuilt.seed == r.oracle.seed);
  CHECK(rebuilt.rng_algorithm == r.oracle.rng_algorithm);

  fs::path dir = fs::temp_directory_path() / "seqrec_synth_oracle";
  fs::create_directories(dir);
  std::string path = (dir / "oracle.json").string();
  r.oracle.save(path);
  TransitionOracle loaded = TransitionOracle::load(path);
  CHECK(loaded.to_json().dump() == r.oracle.to_json().dump());
  fs::remove_all(dir);

  nlohmann::json bad = r.oracle.to_json();
  bad["items"] = std::vector<std::int32_t>{102, 101};  // not ascending
  CHECK_THROWS_AS(TransitionOracle::from_json(bad), DataError);
}

TEST_CASE("generator settings are validated") {
  auto expect_throw = [](auto mutate) {
    SynthSpec s;
    mutate(s);
    CHECK_THROWS_AS(s.validate(), Error);
  };
  expect_throw([](SynthSpec& s) { s.n_matches = 0; });
  expect_throw([](SynthSpec& s) { s.n_items = 2; });
  expect_throw([](SynthSpec& s) { s.n_heroes = 0; });
  expect_throw([](SynthSpec& s) { s.transition_sharpness = -1.0; });
  expect_throw([](SynthSpec& s) { s.consumable_rate = 1.5; });
  expect_throw([](SynthSpec& s) { s.mean_ls = 0.0; });
  expect_throw([](SynthSpec& s) { s.std_duration_s = 0.0; });
  SynthSpec ok;
  CHECK_NOTHROW(ok.validate());
}
