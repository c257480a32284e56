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

#include "seqrec/synth/generate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "seqrec/common.hpp"
#include "seqrec/eval/metrics.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

void SynthSpec::validate() const {
  require(n_matches >= 1, "synth: n_matches must be at least 1");
  require(n_items >= 3, "synth: n_items must be at least 3");
  require(n_heroes >= 1, "synth: n_heroes must be at least 1");
  require(transition_sharpness >= 0.0, "synth: transition_sharpness must be >= 0");
  require(consumable_rate >= 0.0 && consumable_rate <= 1.0,
          "synth: consumable_rate must be in [0, 1]");
  require(mean_ls > 0.0 && std_ls > 0.0, "synth: session-length moments must be positive");
  require(mean_duration_s > 0.0 && std_duration_s > 0.0,
          "synth: duration moments must be positive");
}

nlohmann::json TransitionOracle::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["rng_algorithm"] = rng_algorithm;
  j["seed"] = seed;
  j["items"] = items;
  nlohmann::ordered_json mats = nlohmann::ordered_json::object();
  for (const auto& [hero, mat] : matrices) {
    mats[std::to_string(hero)] = mat;
  }
  j["matrices"] = std::move(mats);
  return j;
}

TransitionOracle TransitionOracle::from_json(const nlohmann::json& j) {
  require_data(j.is_object() && j.contains("items") && j.contains("matrices"),
               "oracle: missing items/matrices");
  TransitionOracle o;
  o.rng_algorithm = j.value("rng_algorithm", std::string());
  o.seed = j.value("seed", std::uint64_t{0});
  o.items = j.at("items").get<std::vector<std::int32_t>>();
  require_data(std::is_sorted(o.items.begin(), o.items.end()) &&
                   std::adjacent_find(o.items.begin(), o.items.end()) == o.items.end(),
               "oracle: items must be strictly ascending");
  std::size_t p = o.items.size();
  for (const auto& [key, val] : j.at("matrices").items()) {
    std::vector<double> mat = val.get<std::vector<double>>();
    require_data(mat.size() == p * p, "oracle: matrix size must be n_items^2");
    o.matrices[static_cast<std::int32_t>(std::stol(key))] = std::move(mat);
  }
  return o;
}

void TransitionOracle::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require_data(out.good(), "oracle: cannot open " + path + " for writing");
  out << to_json().dump(2) << "\n";
  require_data(out.good(), "oracle: write failed for " + path);
}

TransitionOracle TransitionOracle::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_data(in.good(), "oracle: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

std::vector<double> TransitionOracle::scores_after(std::int32_t hero_id,
                                                   std::int32_t last_item) const {
  auto mit = matrices.find(hero_id);
  require_data(mit != matrices.end(),
               "oracle: unknown hero_id " + std::to_string(hero_id));
  auto iit = std::lower_bound(items.begin(), items.end(), last_item);
  require_data(iit != items.end() && *iit == last_item,
               "oracle: unknown item_id " + std::to_string(last_item));
  std::size_t row = static_cast<std::size_t>(iit - items.begin());
  std::size_t p = items.size();
  const double* base = mit->second.data() + row * p;
  return std::vector<double>(base, base + p);
}

std::vector<std::int32_t> TransitionOracle::rank(
    std::int32_t hero_id, std::span<const std::int32_t> prefix) const {
  require(!prefix.empty(), "oracle: prefix must be non-empty");
  std::vector<double> row = scores_after(hero_id, prefix.back());
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  std::vector<std::int32_t> ranked;
  ranked.reserve(order.size());
  for (std::size_t i : order) ranked.push_back(items[i]);
  return ranked;
}

namespace {

// Index drawn from explicit probabilities (assumed to sum to 1).
std::size_t draw_categorical(const std::vector<double>& probs, Rng& rng) {
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;  // guard against rounding shortfall
}

void normalize(std::vector<double>& w) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  require_numeric(total > 0.0, "synth: degenerate weight row");
  for (double& x : w) x /= total;
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t p = static_cast<std::size_t>(spec.n_items);
  const double alpha = spec.transition_sharpness;

  // Vocabulary: item ids deliberately offset from 1..P so that confusing ids
  // with model token indices shows up immediately downstream.
  std::vector<ItemInfo> item_infos;
  std::vector<std::int32_t> item_ids;
  std::size_t n_consumable =
      static_cast<std::size_t>(std::llround(spec.consumable_rate * spec.n_items));
  for (std::size_t i = 0; i < p; ++i) {
    ItemInfo info;
    info.id = 101 + static_cast<std::int32_t>(i);
    info.name = "item_" + std::to_string(info.id);
    info.purchasable = true;
    info.consumable = i < n_consumable;
    item_ids.push_back(info.id);
    item_infos.push_back(std::move(info));
  }
  std::vector<HeroInfo> hero_infos;
  std::vector<std::int32_t> hero_ids;
  for (std::int32_t h = 1; h <= spec.n_heroes; ++h) {
    hero_infos.push_back({h, "hero_" + std::to_string(h)});
    hero_ids.push_back(h);
  }

  // One planted chain, shared by every hero: the hero-agnostic first-order
  // baseline then has the same optimum as the hero-aware oracle, which makes
  // "baseline converges to oracle" a meaningful check.
  std::vector<double> matrix(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    std::vector<double> row(p);
    for (std::size_t j = 0; j < p; ++j) {
      double w = std::pow(rng.next_double(), alpha);
      if (item_infos[j].consumable) w *= 2.0;  // consumables recur throughout
      if (i == j) w *= item_infos[i].consumable ? 4.0 : 0.1;  // repeat behavior
      row[j] = w;
    }
    normalize(row);
    std::copy(row.begin(), row.end(), matrix.begin() + static_cast<std::ptrdiff_t>(i * p));
  }
  std::vector<double> initial(p);
  for (std::size_t j = 0; j < p; ++j) {
    double w = std::pow(rng.next_double(), alpha);
    if (item_infos[j].consumable) w *= 3.0;  // consumables dominate early buys
    initial[j] = w;
  }
  normalize(initial);

  TransitionOracle oracle;
  oracle.items = item_ids;
  oracle.rng_algorithm = Rng::kAlgorithm;
  oracle.seed = spec.seed;
  for (std::int32_t h : hero_ids) oracle.matrices[h] = matrix;

  const std::int64_t len_cap = std::llround(3.0 * spec.mean_ls);
  const std::int32_t dur_cap =
      static_cast<std::int32_t>(std::llround(spec.mean_duration_s + 4.0 * spec.std_duration_s));

  Dataset d;
  d.items = ItemVocab(std::move(item_infos));
  d.heroes = HeroVocab(std::move(hero_infos));
  d.matches.reserve(static_cast<std::size_t>(spec.n_matches));

  std::vector<std::int32_t> hero_pool = hero_ids;
  for (std::int64_t m = 0; m < spec.n_matches; ++m) {
    MatchRecord match;
    match.match_id = 1000 + m;
    match.start_time = 1'600'000'000LL + 97 * m;  // strictly increasing
    match.duration_s = static_cast<std::int32_t>(std::clamp<std::int64_t>(
        std::llround(rng.next_normal(spec.mean_duration_s, spec.std_duration_s)), 300,
        dur_cap));
    match.game_mode = "ranked_all_pick";
    match.abandoned = false;

    if (spec.n_heroes >= 10) rng.shuffle(hero_pool);
    for (std::int32_t slot = 0; slot < 10; ++slot) {
      Session s;
      s.player_slot = slot;
      s.team = slot < 5 ? Team::kRadiant : Team::kDire;
      s.hero_id = spec.n_heroes >= 10
                      ? hero_pool[static_cast<std::size_t>(slot)]
                      : (slot % spec.n_heroes) + 1;

      std::int64_t len = std::clamp<std::int64_t>(
          std::llround(rng.next_normal(spec.mean_ls, spec.std_ls)), 2, len_cap);
      std::vector<std::size_t> walk;
      walk.reserve(static_cast<std::size_t>(len));
      walk.push_back(draw_categorical(initial, rng));
      for (std::int64_t k = 1; k < len; ++k) {
        const double* row = matrix.data() + walk.back() * p;
        std::vector<double> probs(row, row + p);
        walk.push_back(draw_categorical(probs, rng));
      }
      std::vector<std::int32_t> times;
      times.reserve(walk.size());
      for (std::size_t k = 0; k < walk.size(); ++k) {
        times.push_back(static_cast<std::int32_t>(
            rng.next_uniform(0.0, static_cast<double>(match.duration_s))));
      }
      std::sort(times.begin(), times.end());
      for (std::size_t k = 0; k < walk.size(); ++k) {
        s.purchases.push_back({item_ids[walk[k]], times[k]});
      }
      match.sessions.push_back(std::move(s));
    }
    d.matches.push_back(std::move(match));
  }

  return {std::move(d), std::move(oracle)};
}

EvalReport evaluate_oracle(const TransitionOracle& oracle,
                           const std::vector<MatchRecord>& matches,
                           const EvalConfig& cfg) {
  cfg.validate();
  std::unordered_map<std::int32_t, std::int32_t> token_of;
  for (std::size_t i = 0; i < oracle.items.size(); ++i) {
    token_of[oracle.items[i]] = static_cast<std::int32_t>(i) + 1;
  }
  std::vector<double> recall_sum(cfg.ks.size(), 0.0);
  std::vector<double> ndcg_sum(cfg.ks.size(), 0.0);
  std::int64_t events = 0;
  for (const auto& m : matches) {
    for (const auto& s : m.sessions) {
      for (std::size_t j = 1; j < s.purchases.size(); ++j) {
        std::vector<double> scores =
            oracle.scores_after(s.hero_id, s.purchases[j - 1].item_id);
        auto it = token_of.find(s.purchases[j].item_id);
        require_data(it != token_of.end(), "oracle eval: item missing from oracle");
        int rank = rank_of_token(scores, it->second);
        for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
          recall_sum[i] += recall_at_k(rank, cfg.ks[i]);
          ndcg_sum[i] += ndcg_at_k(rank, cfg.ks[i]);
        }
        ++events;
      }
    }
  }
  require_data(events > 0, "oracle eval: no events");
  EvalReport rep;
  rep.events = events;
  rep.ks = cfg.ks;
  for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
    rep.recall.push_back(recall_sum[i] / static_cast<double>(events));
    rep.ndcg.push_back(ndcg_sum[i] / static_cast<double>(events));
  }
  return rep;
}

}  // namespace seqrec
