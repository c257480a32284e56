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

#include "seqrec/models/attention.hpp"

#include <cmath>

#include "seqrec/ad/ops.hpp"
#include "seqrec/common.hpp"
#include "seqrec/models/init.hpp"
#include "seqrec/train/losses.hpp"

namespace seqrec {
namespace detail {

TransformerCore::TransformerCore(std::int64_t vocab_rows, TransformerConfig cfg_in,
                                 std::int64_t max_len, bool causal_in, bool scale_emb_in,
                                 Rng& init_rng)
    : cfg(cfg_in), max_seq_len(max_len), causal(causal_in), scale_emb(scale_emb_in) {
  require(cfg.heads >= 1 && cfg.layers >= 1 && cfg.head_dim >= 1, "transformer: bad config");
  require(cfg.dropout >= 0.0 && cfg.dropout < 1.0, "transformer: bad dropout");
  require(cfg.nonlinearity == "relu" || cfg.nonlinearity == "tanh",
          "transformer: nonlinearity must be relu or tanh");
  std::int64_t d = cfg.width();
  emb = init_embedding(init_rng, {vocab_rows, d});
  pos = init_embedding(init_rng, {max_seq_len, d});
  for (int l = 0; l < cfg.layers; ++l) {
    BlockParams b;
    b.wq = init_dense(init_rng, d, d);
    b.bq = init_zeros({d});
    b.wk = init_dense(init_rng, d, d);
    b.wv = init_dense(init_rng, d, d);
    b.bv = init_zeros({d});
    b.wo = init_dense(init_rng, d, d);
    b.bo = init_zeros({d});
    b.w1 = init_dense(init_rng, d, d);
    b.b1 = init_zeros({d});
    b.w2 = init_dense(init_rng, d, d);
    b.b2 = init_zeros({d});
    b.ln1_g = init_ones({d});
    b.ln1_b = init_zeros({d});
    b.ln2_g = init_ones({d});
    b.ln2_b = init_zeros({d});
    blocks.push_back(std::move(b));
  }
  final_ln_g = init_ones({d});
  final_ln_b = init_zeros({d});
}

namespace {

// [B, S, d] -> [B*heads, S, head_dim]
Tensor split_heads(const Tensor& x, std::int64_t b, std::int64_t s, int heads,
                   std::int64_t head_dim) {
  Tensor r = reshape(x, {b, s, heads, head_dim});
  std::vector<int> perm{0, 2, 1, 3};
  Tensor t = transpose(r, perm);
  return reshape(t, {b * heads, s, head_dim});
}

// [B*heads, S, head_dim] -> [B*S, d]
Tensor merge_heads(const Tensor& x, std::int64_t b, std::int64_t s, int heads,
                   std::int64_t head_dim) {
  Tensor r = reshape(x, {b, heads, s, head_dim});
  std::vector<int> perm{0, 2, 1, 3};
  Tensor t = transpose(r, perm);
  return reshape(t, {b * s, static_cast<std::int64_t>(heads) * head_dim});
}

Tensor affine_2d(const Tensor& x, const Tensor& w, const Tensor& bias) {
  return add(matmul(x, w), bias);
}

}  // namespace

Tensor TransformerCore::forward_states(const TokenBatch& batch, bool train,
                                       Rng* rng) const {
  require(!train || rng != nullptr, "transformer: training forward needs an rng");
  require(batch.width == max_seq_len,
          "transformer: batch must be packed to the fixed window width");
  std::int64_t b = batch.batch;
  std::int64_t s = batch.width;
  std::int64_t d = cfg.width();
  require(b > 0, "transformer: empty batch");

  // Disallowed attention pairs, per head-batch: padding keys everywhere,
  // future keys when causal. Queries at padding positions may end up with
  // every key disallowed; softmax then yields a uniform row whose output is
  // never read (those positions are masked as keys and carry no loss).
  std::vector<std::uint8_t> attn_mask(
      static_cast<std::size_t>(b * cfg.heads * s * s), 0);
  for (std::int64_t r = 0; r < b; ++r) {
    for (std::int64_t i = 0; i < s; ++i) {
      for (std::int64_t j = 0; j < s; ++j) {
        bool bad = batch.mask[static_cast<std::size_t>(r * s + j)] == 0.0 ||
                   (causal && j > i);
        if (!bad) continue;
        for (int hd = 0; hd < cfg.heads; ++hd) {
          attn_mask[static_cast<std::size_t>(((r * cfg.heads + hd) * s + i) * s + j)] = 1;
        }
      }
    }
  }

  Tensor x = embedding_gather(emb, batch.tokens);  // [B*S, d]
  if (scale_emb) x = mul(x, std::sqrt(static_cast<double>(d)));
  x = reshape(x, {b, s, d});
  x = add(x, pos);  // pos [S, d] broadcasts over the batch axis
  if (train && cfg.dropout > 0.0) x = dropout(x, cfg.dropout, true, *rng);

  double scale = 1.0 / std::sqrt(static_cast<double>(cfg.head_dim));
  for (const BlockParams& blk : blocks) {
    // Attention sub-block (pre-norm).
    Tensor a = layer_norm(x, blk.ln1_g, blk.ln1_b, 1e-5);
    Tensor a2 = reshape(a, {b * s, d});
    Tensor qh = split_heads(reshape(affine_2d(a2, blk.wq, blk.bq), {b, s, d}), b, s,
                            cfg.heads, cfg.head_dim);
    Tensor kh = split_heads(reshape(matmul(a2, blk.wk), {b, s, d}), b, s,
                            cfg.heads, cfg.head_dim);
    Tensor vh = split_heads(reshape(affine_2d(a2, blk.wv, blk.bv), {b, s, d}), b, s,
                            cfg.heads, cfg.head_dim);
    Tensor scores = mul(matmul(qh, transpose(kh)), scale);  // [B*h, S, S]
    Tensor weights = softmax(masked_fill(scores, attn_mask, -1e30));
    if (train && cfg.dropout > 0.0) weights = dropout(weights, cfg.dropout, true, *rng);
    Tensor ctx = merge_heads(matmul(weights, vh), b, s, cfg.heads, cfg.head_dim);
    Tensor attn_out = affine_2d(ctx, blk.wo, blk.bo);  // [B*S, d]
    if (train && cfg.dropout > 0.0) attn_out = dropout(attn_out, cfg.dropout, true, *rng);
    x = add(x, reshape(attn_out, {b, s, d}));

    // Feed-forward sub-block (pre-norm).
    Tensor f = reshape(layer_norm(x, blk.ln2_g, blk.ln2_b, 1e-5), {b * s, d});
    Tensor hidden = affine_2d(f, blk.w1, blk.b1);
    hidden = cfg.nonlinearity == "relu" ? relu(hidden) : tanh(hidden);
    if (train && cfg.dropout > 0.0) hidden = dropout(hidden, cfg.dropout, true, *rng);
    Tensor ff = affine_2d(hidden, blk.w2, blk.b2);
    if (train && cfg.dropout > 0.0) ff = dropout(ff, cfg.dropout, true, *rng);
    x = add(x, reshape(ff, {b, s, d}));
  }
  return layer_norm(x, final_ln_g, final_ln_b, 1e-5);
}

void TransformerCore::collect_parameters(std::vector<NamedTensor>& out) const {
  out.push_back({"emb", emb});
  out.push_back({"pos", pos});
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const BlockParams& b = blocks[l];
    std::string p = "block" + std::to_string(l);
    out.push_back({p + ".wq", b.wq});
    out.push_back({p + ".bq", b.bq});
    out.push_back({p + ".wk", b.wk});
    out.push_back({p + ".wv", b.wv});
    out.push_back({p + ".bv", b.bv});
    out.push_back({p + ".wo", b.wo});
    out.push_back({p + ".bo", b.bo});
    out.push_back({p + ".w1", b.w1});
    out.push_back({p + ".b1", b.b1});
    out.push_back({p + ".w2", b.w2});
    out.push_back({p + ".b2", b.b2});
    out.push_back({p + ".ln1_g", b.ln1_g});
    out.push_back({p + ".ln1_b", b.ln1_b});
    out.push_back({p + ".ln2_g", b.ln2_g});
    out.push_back({p + ".ln2_b", b.ln2_b});
  }
  out.push_back({"final_ln_g", final_ln_g});
  out.push_back({"final_ln_b", final_ln_b});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SasrecModel

SasrecModel::SasrecModel(ItemIndexer indexer, std::int64_t max_seq_len,
                         TransformerConfig cfg, Rng& init_rng)
    : indexer_(std::move(indexer)),
      core_(indexer_.n_items() + 1, cfg, max_seq_len, /*causal=*/true,
            /*scale_emb=*/true, init_rng) {}

Tensor SasrecModel::bpr_loss(const TokenBatch& batch,
                             std::span<const std::int32_t> pos_tokens,
                             std::span<const std::int32_t> neg_tokens, bool train,
                             Rng* rng) const {
  std::int64_t n = batch.batch * batch.width;
  require(static_cast<std::int64_t>(pos_tokens.size()) == n &&
              static_cast<std::int64_t>(neg_tokens.size()) == n,
          "sasrec: target arrays must cover every position");
  Tensor states = core_.forward_states(batch, train, rng);
  Tensor states_2d = reshape(states, {n, core_.cfg.width()});
  Tensor pos_emb = embedding_gather(core_.emb, pos_tokens);
  Tensor neg_emb = embedding_gather(core_.emb, neg_tokens);
  Tensor pos_score = sum(mul(states_2d, pos_emb), 1);  // [N]
  Tensor neg_score = sum(mul(states_2d, neg_emb), 1);
  Tensor valid = Tensor::zeros({n});
  for (std::int64_t i = 0; i < n; ++i) {
    valid.data()[static_cast<std::size_t>(i)] =
        pos_tokens[static_cast<std::size_t>(i)] != 0 ? 1.0 : 0.0;
  }
  return loss_bpr(pos_score, neg_score, valid);
}

std::vector<double> SasrecModel::score_tokens(std::span<const std::int32_t> prefix) const {
  return score_batch({{prefix.begin(), prefix.end()}})[0];
}

std::vector<std::vector<double>> SasrecModel::score_batch(
    const std::vector<std::vector<std::int32_t>>& prefixes) const {
  require_data(!prefixes.empty(), "sasrec: empty batch");
  TokenBatch batch = pack_left_padded(prefixes, core_.max_seq_len, /*fixed_width=*/true);
  Tensor states = core_.forward_states(batch, false, nullptr);
  std::int64_t d = core_.cfg.width();
  // Newest position is the last column under left padding.
  Tensor last = reshape(slice(states, 1, batch.width - 1, 1), {batch.batch, d});
  Tensor item_emb = slice(core_.emb, 0, 1, indexer_.n_items());
  Tensor logits = matmul(last, transpose(item_emb));  // [B, |I|]
  std::int64_t p = indexer_.n_items();
  std::vector<std::vector<double>> out(prefixes.size());
  for (std::size_t r = 0; r < prefixes.size(); ++r) {
    out[r].assign(logits.data().begin() + static_cast<std::int64_t>(r) * p,
                  logits.data().begin() + static_cast<std::int64_t>(r + 1) * p);
  }
  return out;
}

std::vector<NamedTensor> SasrecModel::named_parameters() {
  std::vector<NamedTensor> out;
  core_.collect_parameters(out);
  return out;
}

std::vector<Tensor> SasrecModel::parameters() {
  std::vector<Tensor> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

// ---------------------------------------------------------------------------
// BertModel

BertModel::BertModel(ItemIndexer indexer, std::int64_t max_seq_len, TransformerConfig cfg,
                     Rng& init_rng)
    : indexer_(std::move(indexer)),
      core_(indexer_.n_items() + 2, cfg, max_seq_len, /*causal=*/false,
            /*scale_emb=*/false, init_rng) {
  out_bias_ = init_zeros({indexer_.n_items() + 2});
}

Tensor BertModel::logits_from_states(const Tensor& states_2d) const {
  return add(matmul(states_2d, transpose(core_.emb)), out_bias_);
}

Tensor BertModel::forward_token_logits(const TokenBatch& batch) const {
  Tensor states = core_.forward_states(batch, false, nullptr);
  return logits_from_states(
      reshape(states, {batch.batch * batch.width, core_.cfg.width()}));
}

Tensor BertModel::cloze_loss(const TokenBatch& masked_batch,
                             std::span<const std::int32_t> flat_positions,
                             std::span<const std::int32_t> target_tokens, bool train,
                             Rng* rng) const {
  require(!flat_positions.empty(), "bert: no masked positions");
  require(flat_positions.size() == target_tokens.size(), "bert: target count mismatch");
  Tensor states = core_.forward_states(masked_batch, train, rng);
  Tensor states_2d =
      reshape(states, {masked_batch.batch * masked_batch.width, core_.cfg.width()});
  Tensor picked = embedding_gather(states_2d, flat_positions);  // [M, d]
  Tensor logits = logits_from_states(picked);                   // [M, |I|+2]

  // The padding and mask columns are never valid predictions.
  std::int64_t m = static_cast<std::int64_t>(flat_positions.size());
  std::int64_t c = indexer_.n_items() + 2;
  std::vector<std::uint8_t> col_mask(static_cast<std::size_t>(m * c), 0);
  for (std::int64_t r = 0; r < m; ++r) {
    col_mask[static_cast<std::size_t>(r * c)] = 1;
    col_mask[static_cast<std::size_t>(r * c + c - 1)] = 1;
  }
  Tensor masked_logits = masked_fill(logits, col_mask, -1e30);
  for (std::int32_t t : target_tokens) {
    require(t >= 1 && t <= indexer_.n_items(), "bert: target must be an item token");
  }
  return loss_cross_entropy(masked_logits, target_tokens);
}

std::vector<double> BertModel::score_tokens(std::span<const std::int32_t> prefix) const {
  return score_batch({{prefix.begin(), prefix.end()}})[0];
}

std::vector<std::vector<double>> BertModel::score_batch(
    const std::vector<std::vector<std::int32_t>>& prefixes) const {
  require_data(!prefixes.empty(), "bert: empty batch");
  // Keep the newest max_seq_len - 1 tokens and append the mask token.
  std::vector<std::vector<std::int32_t>> queries;
  queries.reserve(prefixes.size());
  for (const auto& p : prefixes) {
    require_data(!p.empty(), "bert: empty prefix");
    std::size_t keep = std::min<std::size_t>(
        p.size(), static_cast<std::size_t>(core_.max_seq_len - 1));
    std::vector<std::int32_t> q(p.end() - static_cast<std::ptrdiff_t>(keep), p.end());
    q.push_back(indexer_.mask_token());
    queries.push_back(std::move(q));
  }
  TokenBatch batch = pack_left_padded(queries, core_.max_seq_len, /*fixed_width=*/true);
  Tensor states = core_.forward_states(batch, false, nullptr);
  std::int64_t d = core_.cfg.width();
  Tensor last = reshape(slice(states, 1, batch.width - 1, 1), {batch.batch, d});
  Tensor logits = logits_from_states(last);  // [B, |I|+2]
  std::int64_t c = indexer_.n_items() + 2;
  std::int64_t p = indexer_.n_items();
  std::vector<std::vector<double>> out(prefixes.size());
  for (std::size_t r = 0; r < prefixes.size(); ++r) {
    auto row0 = logits.data().begin() + static_cast<std::int64_t>(r) * c;
    out[r].assign(row0 + 1, row0 + 1 + p);  // item columns only
  }
  return out;
}

std::vector<NamedTensor> BertModel::named_parameters() {
  std::vector<NamedTensor> out;
  core_.collect_parameters(out);
  out.push_back({"out_bias", out_bias_});
  return out;
}

std::vector<Tensor> BertModel::parameters() {
  std::vector<Tensor> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

}  // namespace seqrec
