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

#include "seqrec/eval/evaluate.hpp"

#include <algorithm>
#include <sstream>

#include "seqrec/common.hpp"
#include "seqrec/eval/metrics.hpp"
#include "seqrec/models/gru.hpp"

namespace seqrec {

void EvalConfig::validate() const {
  require(!ks.empty(), "eval: no cutoffs");
  int prev = 0;
  for (int k : ks) {
    require(k > prev, "eval: cutoffs must be positive and ascending");
    prev = k;
  }
}

double EvalReport::recall_at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return recall[i];
  }
  throw Error("eval report has no cutoff " + std::to_string(k));
}

double EvalReport::ndcg_at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return ndcg[i];
  }
  throw Error("eval report has no cutoff " + std::to_string(k));
}

nlohmann::json EvalReport::to_json(const std::string& model_name) const {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["events"] = events;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    metrics["recall@" + std::to_string(ks[i])] = recall[i];
    metrics["ndcg@" + std::to_string(ks[i])] = ndcg[i];
  }
  j["metrics"] = std::move(metrics);
  return j;
}

namespace {

struct Accumulator {
  std::vector<double> recall_sum;
  std::vector<double> ndcg_sum;
  std::int64_t events = 0;

  explicit Accumulator(std::size_t n_ks) : recall_sum(n_ks, 0.0), ndcg_sum(n_ks, 0.0) {}

  void add(int rank, const std::vector<int>& ks) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      recall_sum[i] += recall_at_k(rank, ks[i]);
      ndcg_sum[i] += ndcg_at_k(rank, ks[i]);
    }
    ++events;
  }

  EvalReport finish(const EvalConfig& cfg) const {
    require(events > 0, "evaluate: no events");
    EvalReport r;
    r.events = events;
    r.ks = cfg.ks;
    for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
      r.recall.push_back(recall_sum[i] / static_cast<double>(events));
      r.ndcg.push_back(ndcg_sum[i] / static_cast<double>(events));
    }
    return r;
  }
};

void score_rows_into(Accumulator& acc, const std::vector<std::vector<double>>& rows,
                     std::span<const std::int32_t> tokens, const EvalConfig& cfg) {
  require(rows.size() == tokens.size() - 1, "evaluate: row count mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    acc.add(rank_of_token(rows[i], tokens[i + 1]), cfg.ks);
  }
}

}  // namespace

EvalReport evaluate(const Ranker& model,
                    const std::vector<std::vector<std::int32_t>>& sessions,
                    const EvalConfig& cfg) {
  cfg.validate();
  require_data(!sessions.empty(), "evaluate: empty split");
  Accumulator acc(cfg.ks.size());

  if (const auto* gru = dynamic_cast<const GruModel*>(&model)) {
    // One recurrence pass over a group of sessions at a time.
    constexpr std::size_t kChunk = 64;
    for (std::size_t at = 0; at < sessions.size(); at += kChunk) {
      std::size_t end = std::min(sessions.size(), at + kChunk);
      std::vector<std::vector<std::int32_t>> chunk(sessions.begin() + at,
                                                   sessions.begin() + end);
      auto all_rows = gru->score_sessions_batch(chunk);
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        score_rows_into(acc, all_rows[i], chunk[i], cfg);
      }
    }
  } else {
    for (const auto& s : sessions) {
      score_rows_into(acc, model.score_session(s), s, cfg);
    }
  }
  return acc.finish(cfg);
}

EvalReport evaluate_with(const ScoreFn& scorer, std::int64_t max_seq_len,
                         const std::vector<std::vector<std::int32_t>>& sessions,
                         const EvalConfig& cfg) {
  cfg.validate();
  require_data(!sessions.empty(), "evaluate: empty split");
  require(max_seq_len > 0, "evaluate: max_seq_len must be positive");
  Accumulator acc(cfg.ks.size());
  for (const auto& s : sessions) {
    require_data(s.size() >= 2, "evaluate: session shorter than 2");
    for (std::size_t j = 1; j < s.size(); ++j) {
      std::size_t start =
          j > static_cast<std::size_t>(max_seq_len) ? j - static_cast<std::size_t>(max_seq_len) : 0;
      std::vector<double> scores =
          scorer(std::span<const std::int32_t>(s.data() + start, j - start));
      acc.add(rank_of_token(scores, s[j]), cfg.ks);
    }
  }
  return acc.finish(cfg);
}

std::string leaderboard_csv(std::vector<std::pair<std::string, EvalReport>> reports) {
  require_data(!reports.empty(), "leaderboard: no reports");
  for (const auto& [name, r] : reports) {
    require_data(r.ks == reports.front().second.ks,
                 "leaderboard: reports use different cutoffs");
  }
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    double ra = a.second.recall_at(3), rb = b.second.recall_at(3);
    if (ra != rb) return ra > rb;
    double na = a.second.ndcg_at(3), nb = b.second.ndcg_at(3);
    if (na != nb) return na > nb;
    return a.first < b.first;
  });
  std::ostringstream out;
  out << "model,rec@1,ndcg@1,rec@3,ndcg@3,events\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& [name, r] : reports) {
    out << name << ',' << r.recall_at(1) << ',' << r.ndcg_at(1) << ',' << r.recall_at(3)
        << ',' << r.ndcg_at(3) << ',' << r.events << "\n";
  }
  return out.str();
}

}  // namespace seqrec
