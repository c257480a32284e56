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

#include "seqrec/models/narm.hpp"

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

}  // namespace

NarmModel::NarmModel(ItemIndexer indexer, std::int64_t max_seq_len, NarmConfig cfg,
                     Rng& init_rng)
    : indexer_(std::move(indexer)), max_seq_len_(max_seq_len), cfg_(cfg) {
  require(cfg_.emb_size > 0 && cfg_.enc_size > 0 && cfg_.enc_layers >= 1,
          "narm: bad config");
  std::int64_t p = indexer_.n_items();
  emb_ = init_embedding(init_rng, {p + 1, cfg_.emb_size});
  std::int64_t in = cfg_.emb_size;
  for (int l = 0; l < cfg_.enc_layers; ++l) {
    cells_.push_back(make_cell(init_rng, in, cfg_.enc_size));
    in = cfg_.enc_size;
  }
  a1_ = init_dense(init_rng, cfg_.enc_size, cfg_.enc_size);
  a2_ = init_dense(init_rng, cfg_.enc_size, cfg_.enc_size);
  v_ = init_dense(init_rng, cfg_.enc_size, 1);
  b_map_ = init_dense(init_rng, 2 * cfg_.enc_size, cfg_.emb_size);
}

NarmModel::ForwardParts NarmModel::forward_parts(const TokenBatch& batch, bool train,
                                                 Rng* rng) const {
  require(!train || rng != nullptr, "narm: training forward needs an rng");
  std::int64_t b = batch.batch;
  std::int64_t w = batch.width;
  require(b > 0 && w > 0, "narm: empty batch");

  std::vector<Tensor> h(cells_.size());
  for (auto& hs : h) hs = Tensor::zeros({b, cfg_.enc_size});
  std::vector<Tensor> states;
  states.reserve(static_cast<std::size_t>(w));

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
    if (train && cfg_.emb_dropout > 0.0) x = dropout(x, cfg_.emb_dropout, true, *rng);
    for (std::size_t l = 0; l < cells_.size(); ++l) {
      Tensor input = l == 0 ? x : h[l - 1];
      Tensor h_new = gru_cell(input, h[l], cells_[l]);
      h[l] = add(mul(h_new, m), mul(h[l], m_inv));
    }
    states.push_back(h.back());
  }

  ForwardParts parts;
  parts.states = states;
  parts.c_global = states.back();

  // Attention logits e_t = v . sigmoid(A1 c_g + A2 h_t), padding -> -1e30.
  Tensor q = matmul(parts.c_global, a1_);  // [B, enc]
  std::vector<Tensor> cols;
  cols.reserve(states.size());
  for (const Tensor& ht : states) {
    cols.push_back(matmul(sigmoid(add(q, matmul(ht, a2_))), v_));  // [B, 1]
  }
  Tensor e = concat(cols, 1);  // [B, W]
  std::vector<std::uint8_t> pad_mask(static_cast<std::size_t>(b * w), 0);
  for (std::size_t i = 0; i < pad_mask.size(); ++i) {
    pad_mask[i] = batch.mask[i] == 0.0 ? 1 : 0;
  }
  parts.alpha = softmax(masked_fill(e, pad_mask, -1e30));  // [B, W]

  Tensor c_local = Tensor::zeros({b, cfg_.enc_size});
  for (std::int64_t t = 0; t < w; ++t) {
    Tensor at = slice(parts.alpha, 1, t, 1);  // [B, 1]
    c_local = add(c_local, mul(states[static_cast<std::size_t>(t)], at));
  }
  parts.c_local = c_local;

  Tensor c = concat(std::vector<Tensor>{parts.c_global, parts.c_local}, 1);  // [B, 2enc]
  if (train && cfg_.ctx_dropout > 0.0) c = dropout(c, cfg_.ctx_dropout, true, *rng);
  Tensor proj = matmul(c, b_map_);                               // [B, emb]
  Tensor item_emb = slice(emb_, 0, 1, indexer_.n_items());        // [|I|, emb]
  parts.logits = matmul(proj, transpose(item_emb));               // [B, |I|]
  return parts;
}

Tensor NarmModel::forward_logits(const TokenBatch& batch, bool train, Rng* rng) const {
  return forward_parts(batch, train, rng).logits;
}

Tensor NarmModel::loss_on_batch(const TokenBatch& batch,
                                std::span<const std::int32_t> target_cols, bool train,
                                Rng* rng) const {
  return loss_cross_entropy(forward_logits(batch, train, rng), target_cols);
}

NarmModel::DebugTrace NarmModel::forward_debug(const TokenBatch& batch) const {
  ForwardParts parts = forward_parts(batch, false, nullptr);
  DebugTrace trace;
  for (const Tensor& s : parts.states) trace.hidden.push_back(s.data());
  trace.alpha = parts.alpha.data();
  trace.c_global = parts.c_global.data();
  trace.c_local = parts.c_local.data();
  return trace;
}

std::vector<double> NarmModel::score_tokens(std::span<const std::int32_t> prefix) const {
  return score_batch({{prefix.begin(), prefix.end()}})[0];
}

std::vector<std::vector<double>> NarmModel::score_batch(
    const std::vector<std::vector<std::int32_t>>& prefixes) const {
  require_data(!prefixes.empty(), "narm: empty batch");
  TokenBatch batch = pack_left_padded(prefixes, max_seq_len_, /*fixed_width=*/false);
  Tensor logits = forward_logits(batch, false, nullptr);
  std::int64_t p = indexer_.n_items();
  std::vector<std::vector<double>> out(prefixes.size());
  for (std::size_t r = 0; r < prefixes.size(); ++r) {
    out[r].assign(logits.data().begin() + static_cast<std::int64_t>(r) * p,
                  logits.data().begin() + static_cast<std::int64_t>(r + 1) * p);
  }
  return out;
}

std::vector<NamedTensor> NarmModel::named_parameters() {
  std::vector<NamedTensor> out;
  out.push_back({"emb", emb_});
  for (std::size_t l = 0; l < cells_.size(); ++l) {
    std::string prefix = "cell" + std::to_string(l);
    out.push_back({prefix + ".wz", cells_[l].wz});
    out.push_back({prefix + ".uz", cells_[l].uz});
    out.push_back({prefix + ".bz", cells_[l].bz});
    out.push_back({prefix + ".wr", cells_[l].wr});
    out.push_back({prefix + ".ur", cells_[l].ur});
    out.push_back({prefix + ".br", cells_[l].br});
    out.push_back({prefix + ".wn", cells_[l].wn});
    out.push_back({prefix + ".un", cells_[l].un});
    out.push_back({prefix + ".bn", cells_[l].bn});
  }
  out.push_back({"a1", a1_});
  out.push_back({"a2", a2_});
  out.push_back({"v", v_});
  out.push_back({"b_map", b_map_});
  return out;
}

std::vector<Tensor> NarmModel::parameters() {
  std::vector<Tensor> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

}  // namespace seqrec
