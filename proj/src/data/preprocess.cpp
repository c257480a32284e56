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

#include "seqrec/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqrec/common.hpp"

namespace seqrec {

void SplitSpec::validate() const {
  require_data(train_frac > 0.0 && val_frac > 0.0 && test_frac > 0.0,
               "split fractions must all be > 0");
  double sum = train_frac + val_frac + test_frac;
  require_data(std::abs(sum - 1.0) <= 1e-9,
               "split fractions must sum to 1, got " + std::to_string(sum));
}

Dataset preprocess(const Dataset& d, const PreprocessOptions& opts) {
  require_data(opts.trim_quantile >= 0.0 && opts.trim_quantile < 0.5,
               "trim_quantile must be in [0, 0.5)");

  Dataset out;
  out.items = d.items;
  out.heroes = d.heroes;

  for (const auto& m : d.matches) {
    if (!opts.mode_filter.empty() && m.game_mode != opts.mode_filter) continue;
    if (m.abandoned) continue;
    if (!m.valid()) continue;
    bool bad_item = false;
    bool short_session = false;
    for (const auto& s : m.sessions) {
      if (s.purchases.size() < 2) short_session = true;
      for (const auto& p : s.purchases) {
        const ItemInfo* info = d.items.find(p.item_id);
        if (info == nullptr || !info->purchasable) bad_item = true;
      }
    }
    if (bad_item || short_session) continue;
    out.matches.push_back(m);
  }

  // Duration trim: nearest-rank cut counts, floor(n*q) from each end.
  std::size_t n = out.matches.size();
  std::size_t cut = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * opts.trim_quantile + 1e-9));
  if (cut > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return out.matches[a].duration_s < out.matches[b].duration_s;
    });
    std::vector<bool> drop(n, false);
    for (std::size_t i = 0; i < cut; ++i) {
      drop[order[i]] = true;
      drop[order[n - 1 - i]] = true;
    }
    std::vector<MatchRecord> kept;
    kept.reserve(n - 2 * cut);
    for (std::size_t i = 0; i < n; ++i) {
      if (!drop[i]) kept.push_back(std::move(out.matches[i]));
    }
    out.matches = std::move(kept);
  }

  std::stable_sort(out.matches.begin(), out.matches.end(),
                   [](const MatchRecord& a, const MatchRecord& b) {
                     return a.start_time < b.start_time;
                   });
  return out;
}

Splits split_chronological(const Dataset& d, const SplitSpec& spec) {
  spec.validate();
  for (std::size_t i = 1; i < d.matches.size(); ++i) {
    require_data(d.matches[i - 1].start_time <= d.matches[i].start_time,
                 "dataset must be sorted by start_time before splitting");
  }
  std::size_t n = d.matches.size();
  // +1e-6 absorbs representation error in the fraction products
  // (e.g. 0.94 * 100 evaluating to 93.999...).
  auto boundary = [n](double frac) {
    return static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * frac + 1e-6));
  };
  std::size_t b_train = boundary(spec.train_frac);
  std::size_t b_val = boundary(spec.train_frac + spec.val_frac);
  require_data(b_train >= 1, "train split is empty");
  require_data(b_val > b_train, "val split is empty");
  require_data(n > b_val, "test split is empty");

  Splits s;
  s.boundary_train = b_train;
  s.boundary_val = b_val;
  for (Dataset* part : {&s.train, &s.val, &s.test}) {
    part->items = d.items;
    part->heroes = d.heroes;
  }
  s.train.matches.assign(d.matches.begin(), d.matches.begin() + b_train);
  s.val.matches.assign(d.matches.begin() + b_train, d.matches.begin() + b_val);
  s.test.matches.assign(d.matches.begin() + b_val, d.matches.end());
  return s;
}

DatasetStats compute_stats(const Dataset& d) {
  DatasetStats st;
  st.n_matches = d.matches.size();
  double sum = 0.0;
  std::size_t n_sessions = 0;
  for (const auto& m : d.matches) {
    for (const auto& s : m.sessions) {
      ++n_sessions;
      sum += static_cast<double>(s.purchases.size());
      st.hero_freq[s.hero_id] += 1;
      for (const auto& p : s.purchases) st.item_freq[p.item_id] += 1;
    }
  }
  st.n_sessions = n_sessions;
  st.n_items_observed = st.item_freq.size();
  st.n_heroes_observed = st.hero_freq.size();
  if (n_sessions > 0) {
    st.mean_session_length = sum / static_cast<double>(n_sessions);
    double sq = 0.0;
    for (const auto& m : d.matches) {
      for (const auto& s : m.sessions) {
        double dlt = static_cast<double>(s.purchases.size()) - st.mean_session_length;
        sq += dlt * dlt;
      }
    }
    st.std_session_length = std::sqrt(sq / static_cast<double>(n_sessions));
  }
  return st;
}

}  // namespace seqrec
