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

#include "seqrec/models/gru.hpp"

#include <algorithm>

#include "seqrec/common.hpp"
#include "seqrec/models/init.hpp"
#include "seqrec/train/losses.hpp"

namespace seqrec {

namespace {

GruCellParams make_cell(Rng& rng, std::int64_t in, std::int64_t hidden) {
  GruCellParams p;
  p.wz = init_dense(rng, in, hidden);
  p.uz = init_dense(rng, hidden, hidden);
  p.bz = init_zeros({hidden});
  p.wr = init_dense(rng, in, hidden);
  p.ur = init_dense(rng, hidden, hidden);
  p.br = init_zeros({hidden});
  p.wn = init_dense(rng, in, hidden);
  p.un = init_dense(rng, hidden, hidden);
  p.bn = init_zeros({hidden});
  return p;
}

void append_cell_params(std::vector<NamedTensor>& out, const std::string& prefix,
                        const GruCellParams& p) {
  out.push_back({prefix + ".wz", p.wz});
  out.push_back({prefix + ".uz", p.uz});
  out.push_back({prefix + ".bz", p.bz});
  out.push_back({prefix + ".wr", p.wr});
  out.push_back({prefix + ".ur", p.ur});
  out.push_back({prefix + ".br", p.br});
  out.push_back({prefix + ".wn", p.wn});
  out.push_back({prefix + ".un", p.un});
  out.push_back({prefix + ".bn", p.bn});
}

}  // namespace

GruModel::GruModel(ItemIndexer indexer, std::int64_t max_seq_len, GruConfig cfg,
                   Rng& init_rng)
    : indexer_(std::move(indexer)), max_seq_len_(max_seq_len), cfg_(cfg) {
  require(cfg_.emb_size > 0 && cfg_.cell_size > 0 && cfg_.layers >= 1, "gru: bad config");
  require(cfg_.dropout >= 0.0 && cfg_.dropout < 1.0, "gru: bad dropout");
  std::int64_t p = indexer_.n_items();
  emb_ = init_embedding(init_rng, {p + 1, cfg_.emb_size});
  std::int64_t in = cfg_.emb_size;
  for (int l = 0; l < cfg_.layers; ++l) {
    cells_.push_back(make_cell(init_rng, in, cfg_.cell_size));
    in = cfg_.cell_size;
  }
  out_w_ = init_dense(init_rng, cfg_.cell_size, p);
  out_b_ = init_zeros({p});
}

std::vector<Tensor> GruModel::run_stack(const TokenBatch& batch, bool train, Rng* rng,
                                        bool collect_all) const {
  require(!train || rng != nullptr, "gru: training forward needs an rng");
  std::int64_t b = batch.batch;
  std::int64_t w = batch.width;
  require(b > 0 && w > 0, "gru: empty batch");

  std::vector<Tensor> h(cells_.size());
  for (auto& hs : h) hs = Tensor::zeros({b, cfg_.cell_size});
  std::vector<Tensor> collected;
  if (collect_all) collected.reserve(static_cast<std::size_t>(w));

  std::vector<std::int32_t> ids(static_cast<std::size_t>(b));
  for (std::int64_t t = 0; t < w; ++t) {
    for (std::int64_t r = 0; r < b; ++r) {
      ids[static_cast<std::size_t>(r)] = batch.token_at(r, t);
    }
    Tensor m = Tensor::zeros({b, 1});
    Tensor m_inv = Tensor::zeros({b, 1});
    for (std::int64_t r = 0; r < b; ++r) {
      double mv = batch.mask[static_cast<std::size_t>(r * w + t)];
      m.data()[static_cast<std::size_t>(r)] = mv;
      m_inv.data()[static_cast<std::size_t>(r)] = 1.0 - mv;
    }

    Tensor x = embedding_gather(emb_, ids);
    if (train && cfg_.dropout > 0.0) x = dropout(x, cfg_.dropout, true, *rng);
    for (std::size_t l = 0; l < cells_.size(); ++l) {
      Tensor input = l == 0 ? x : h[l - 1];
      if (l > 0 && train && cfg_.dropout > 0.0) {
        input = dropout(input, cfg_.dropout, true, *rng);
      }
      Tensor h_new = gru_cell(input, h[l], cells_[l]);
      h[l] = add(mul(h_new, m), mul(h[l], m_inv));
    }
    if (collect_all) collected.push_back(h.back());
  }
  if (collect_all) return collected;
  return {h.back()};
}

Tensor GruModel::forward_final_state(const TokenBatch& batch, bool train, Rng* rng) const {
  return run_stack(batch, train, rng, /*collect_all=*/false)[0];
}

Tensor GruModel::logits_from_state(const Tensor& h) const {
  return add(matmul(h, out_w_), out_b_);
}

Tensor GruModel::loss_on_batch(const TokenBatch& batch,
                               std::span<const std::int32_t> target_cols, bool train,
                               Rng* rng) const {
  Tensor logits = logits_from_state(forward_final_state(batch, train, rng));
  return loss_cross_entropy(logits, target_cols);
}

Tensor GruModel::sequence_loss(const TokenBatch& sessions, bool train, Rng* rng) const {
  std::int64_t b = sessions.batch;
  std::int64_t w = sessions.width;
  require(w >= 2, "gru: sequence_loss needs width >= 2");
  std::vector<Tensor> states = run_stack(sessions, train, rng, /*collect_all=*/true);

  // State at column t predicts the token at column t+1; keep (t, row) pairs
  // whose successor is a real token. With left padding the predecessor is
  // then real too (or the state is still zero only for the first event).
  std::vector<std::int32_t> rows;  // index into the stacked [ (w-1)*b, H ] matrix
  std::vector<std::int32_t> target_cols;
  for (std::int64_t t = 0; t + 1 < w; ++t) {
    for (std::int64_t r = 0; r < b; ++r) {
      if (sessions.mask[static_cast<std::size_t>(r * w + t)] == 1.0 &&
          sessions.mask[static_cast<std::size_t>(r * w + t + 1)] == 1.0) {
        rows.push_back(static_cast<std::int32_t>(t * b + r));
        target_cols.push_back(sessions.token_at(r, t + 1) - 1);
      }
    }
  }
  require(!rows.empty(), "gru: sequence_loss found no prediction events");

  std::vector<Tensor> prefix_states(states.begin(), states.end() - 1);
  Tensor stacked = concat(prefix_states, 0);              // [(w-1)*b, H]
  Tensor picked = embedding_gather(stacked, rows);        // [M, H]
  Tensor logits = logits_from_state(picked);              // [M, |I|]
  return loss_cross_entropy(logits, target_cols);
}

std::vector<double> GruModel::score_tokens(std::span<const std::int32_t> prefix) const {
  return score_batch({{prefix.begin(), prefix.end()}})[0];
}

std::vector<std::vector<double>> GruModel::score_batch(
    const std::vector<std::vector<std::int32_t>>& prefixes) const {
  require_data(!prefixes.empty(), "gru: empty batch");
  TokenBatch batch = pack_left_padded(prefixes, max_seq_len_, /*fixed_width=*/false);
  Tensor logits = logits_from_state(forward_final_state(batch, false, nullptr));
  std::int64_t p = indexer_.n_items();
  std::vector<std::vector<double>> out(prefixes.size());
  for (std::size_t r = 0; r < prefixes.size(); ++r) {
    out[r].assign(logits.data().begin() + static_cast<std::int64_t>(r) * p,
                  logits.data().begin() + static_cast<std::int64_t>(r + 1) * p);
  }
  return out;
}

std::vector<std::vector<double>> GruModel::score_session(
    std::span<const std::int32_t> tokens) const {
  std::vector<std::vector<std::int32_t>> one{{tokens.begin(), tokens.end()}};
  return score_sessions_batch(one)[0];
}

std::vector<std::vector<std::vector<double>>> GruModel::score_sessions_batch(
    const std::vector<std::vector<std::int32_t>>& sessions) const {
  std::vector<std::vector<std::vector<double>>> results(sessions.size());

  // Sessions whose every prefix fits the window can share one recurrence
  // pass; the rest take the generic per-prefix route.
  std::vector<std::vector<std::int32_t>> fast;
  std::vector<std::size_t> fast_at;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    require_data(sessions[i].size() >= 2, "score_sessions_batch: session too short");
    if (static_cast<std::int64_t>(sessions[i].size()) <= max_seq_len_ + 1) {
      fast.push_back(sessions[i]);
      fast_at.push_back(i);
    } else {
      results[i] = Ranker::score_session(sessions[i]);
    }
  }
  if (fast.empty()) return results;

  TokenBatch batch = pack_left_padded(fast, max_seq_len_ + 1, /*fixed_width=*/false);
  std::vector<Tensor> states = run_stack(batch, false, nullptr, /*collect_all=*/true);
  std::int64_t b = batch.batch;
  std::int64_t w = batch.width;

  // Logits for every state that precedes a real token.
  std::vector<std::int32_t> rows;
  for (std::int64_t t = 0; t + 1 < w; ++t) {
    for (std::int64_t r = 0; r < b; ++r) {
      if (batch.mask[static_cast<std::size_t>(r * w + t)] == 1.0) {
        rows.push_back(static_cast<std::int32_t>(t * b + r));
      }
    }
  }
  std::vector<Tensor> prefix_states(states.begin(), states.end() - 1);
  Tensor stacked = concat(prefix_states, 0);
  Tensor picked = embedding_gather(stacked, rows);
  Tensor logits = logits_from_state(picked);

  // Row index of (t, r) pairs in `logits`, then split back per session.
  std::unordered_map<std::int64_t, std::int64_t> row_pos;
  row_pos.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    row_pos[rows[i]] = static_cast<std::int64_t>(i);
  }
  std::int64_t p = indexer_.n_items();
  for (std::int64_t r = 0; r < b; ++r) {
    std::int64_t n = static_cast<std::int64_t>(fast[static_cast<std::size_t>(r)].size());
    std::int64_t start = w - n;
    std::vector<std::vector<double>> session_rows;
    session_rows.reserve(static_cast<std::size_t>(n - 1));
    for (std::int64_t j = 0; j < n - 1; ++j) {
      std::int64_t t = start + j;
      std::int64_t li = row_pos.at(t * b + r);
      session_rows.emplace_back(logits.data().begin() + li * p,
                                logits.data().begin() + (li + 1) * p);
    }
    results[fast_at[static_cast<std::size_t>(r)]] = std::move(session_rows);
  }
  return results;
}

std::vector<NamedTensor> GruModel::named_parameters() {
  std::vector<NamedTensor> out;
  out.push_back({"emb", emb_});
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    append_cell_params(out, "cell" + std::to_string(l), cells_[l]);
  }
  out.push_back({"out_w", out_w_});
  out.push_back({"out_b", out_b_});
  return out;
}

std::vector<Tensor> GruModel::parameters() {
  std::vector<Tensor> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

}  // namespace seqrec
