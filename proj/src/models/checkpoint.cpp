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

#include "seqrec/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "seqrec/common.hpp"
#include "seqrec/models/attention.hpp"
#include "seqrec/models/counting.hpp"
#include "seqrec/models/gru.hpp"
#include "seqrec/models/lr.hpp"
#include "seqrec/models/mlp.hpp"
#include "seqrec/models/narm.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are written as native little-endian floats");

namespace seqrec {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json get_required(const nlohmann::json& j, const char* key) {
  require_data(j.contains(key), std::string("checkpoint: missing config field ") + key);
  return j.at(key);
}

}  // namespace

std::unique_ptr<Ranker> make_neural_model(const std::string& kind, ItemIndexer indexer,
                                          std::int64_t max_seq_len,
                                          const nlohmann::json& hyper, Rng& init_rng) {
  if (kind == "lr") {
    return std::make_unique<LrModel>(std::move(indexer), max_seq_len, init_rng);
  }
  if (kind == "mlp") {
    MlpConfig cfg;
    cfg.hidden_size = get_required(hyper, "hidden_size").get<std::int64_t>();
    cfg.hidden_layers = get_required(hyper, "hidden_layers").get<int>();
    return std::make_unique<MlpModel>(std::move(indexer), max_seq_len, cfg, init_rng);
  }
  if (kind == "gru") {
    GruConfig cfg;
    cfg.emb_size = get_required(hyper, "emb_size").get<std::int64_t>();
    cfg.cell_size = get_required(hyper, "cell_size").get<std::int64_t>();
    cfg.layers = get_required(hyper, "layers").get<int>();
    cfg.dropout = get_required(hyper, "dropout").get<double>();
    return std::make_unique<GruModel>(std::move(indexer), max_seq_len, cfg, init_rng);
  }
  if (kind == "narm") {
    NarmConfig cfg;
    cfg.emb_size = get_required(hyper, "emb_size").get<std::int64_t>();
    cfg.enc_size = get_required(hyper, "enc_size").get<std::int64_t>();
    cfg.enc_layers = get_required(hyper, "enc_layers").get<int>();
    cfg.ctx_dropout = get_required(hyper, "ctx_dropout").get<double>();
    cfg.emb_dropout = get_required(hyper, "emb_dropout").get<double>();
    return std::make_unique<NarmModel>(std::move(indexer), max_seq_len, cfg, init_rng);
  }
  if (kind == "sasrec" || kind == "bert4rec") {
    TransformerConfig cfg;
    cfg.heads = get_required(hyper, "heads").get<int>();
    cfg.layers = get_required(hyper, "layers").get<int>();
    cfg.head_dim = get_required(hyper, "head_dim").get<std::int64_t>();
    cfg.dropout = get_required(hyper, "dropout").get<double>();
    cfg.nonlinearity = get_required(hyper, "nonlinearity").get<std::string>();
    if (kind == "sasrec") {
      return std::make_unique<SasrecModel>(std::move(indexer), max_seq_len, cfg, init_rng);
    }
    return std::make_unique<BertModel>(std::move(indexer), max_seq_len, cfg, init_rng);
  }
  throw DataError("unknown model kind: " + kind);
}

nlohmann::json hyper_json_of(const Ranker& model) {
  ordered_json h = ordered_json::object();
  if (const auto* m = dynamic_cast<const MlpModel*>(&model)) {
    h["hidden_size"] = m->config().hidden_size;
    h["hidden_layers"] = m->config().hidden_layers;
  } else if (const auto* g = dynamic_cast<const GruModel*>(&model)) {
    h["emb_size"] = g->config().emb_size;
    h["cell_size"] = g->config().cell_size;
    h["layers"] = g->config().layers;
    h["dropout"] = g->config().dropout;
  } else if (const auto* n = dynamic_cast<const NarmModel*>(&model)) {
    h["emb_size"] = n->config().emb_size;
    h["enc_size"] = n->config().enc_size;
    h["enc_layers"] = n->config().enc_layers;
    h["ctx_dropout"] = n->config().ctx_dropout;
    h["emb_dropout"] = n->config().emb_dropout;
  } else if (const auto* s = dynamic_cast<const SasrecModel*>(&model)) {
    h["heads"] = s->config().heads;
    h["layers"] = s->config().layers;
    h["head_dim"] = s->config().head_dim;
    h["dropout"] = s->config().dropout;
    h["nonlinearity"] = s->config().nonlinearity;
  } else if (const auto* b = dynamic_cast<const BertModel*>(&model)) {
    h["heads"] = b->config().heads;
    h["layers"] = b->config().layers;
    h["head_dim"] = b->config().head_dim;
    h["dropout"] = b->config().dropout;
    h["nonlinearity"] = b->config().nonlinearity;
  }
  // pop / markov / lr carry no hyperparameters.
  return h;
}

std::vector<NamedTensor> named_parameters_of(Ranker& model) {
  if (auto* m = dynamic_cast<LrModel*>(&model)) return m->named_parameters();
  if (auto* m = dynamic_cast<MlpModel*>(&model)) return m->named_parameters();
  if (auto* m = dynamic_cast<GruModel*>(&model)) return m->named_parameters();
  if (auto* m = dynamic_cast<NarmModel*>(&model)) return m->named_parameters();
  if (auto* m = dynamic_cast<SasrecModel*>(&model)) return m->named_parameters();
  if (auto* m = dynamic_cast<BertModel*>(&model)) return m->named_parameters();
  if (auto* m = dynamic_cast<PopModel*>(&model)) {
    Tensor t = Tensor::from_data({static_cast<std::int64_t>(m->scores().size())},
                                 m->scores());
    return {{"scores", t}};
  }
  if (auto* m = dynamic_cast<MarkovModel*>(&model)) {
    Tensor t = Tensor::from_data({static_cast<std::int64_t>(m->score_table().size())},
                                 m->score_table());
    return {{"score_table", t}};
  }
  throw Error("named_parameters_of: unknown model type");
}

void save_model_checkpoint(const std::string& path, Ranker& model) {
  std::vector<NamedTensor> tensors = named_parameters_of(model);

  ordered_json header;
  header["format_version"] = 1;
  header["kind"] = model.kind();
  ordered_json config;
  config["items"] = model.indexer().items();
  config["max_seq_len"] = model.max_seq_len();
  config["hyper"] = hyper_json_of(model);
  header["config"] = std::move(config);

  ordered_json entries = ordered_json::array();
  std::int64_t offset = 0;
  for (const NamedTensor& nt : tensors) {
    ordered_json e;
    e["name"] = nt.name;
    e["shape"] = nt.tensor.shape();
    e["dtype"] = "f32";
    e["byte_offset"] = offset;
    e["byte_len"] = nt.tensor.numel() * 4;
    offset += nt.tensor.numel() * 4;
    entries.push_back(std::move(e));
  }
  header["tensors"] = std::move(entries);

  std::ofstream out(path, std::ios::binary);
  require_data(out.good(), "cannot write checkpoint: " + path);
  out << header.dump() << "\n";
  for (const NamedTensor& nt : tensors) {
    for (double v : nt.tensor.data()) {
      float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof(float));
    }
  }
  require_data(out.good(), "checkpoint write failed: " + path);
}

std::unique_ptr<Ranker> load_model_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_data(in.good(), "cannot read checkpoint: " + path);
  std::string header_line;
  require_data(static_cast<bool>(std::getline(in, header_line)),
               "checkpoint: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad header json: ") + e.what());
  }
  require_data(header.value("format_version", 0) == 1,
               "checkpoint: unsupported format_version");
  std::string kind = get_required(header, "kind").get<std::string>();
  nlohmann::json config = get_required(header, "config");
  std::vector<std::int32_t> items =
      get_required(config, "items").get<std::vector<std::int32_t>>();
  std::int64_t max_seq_len = get_required(config, "max_seq_len").get<std::int64_t>();
  nlohmann::json hyper = get_required(config, "hyper");

  std::vector<char> blob((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());

  struct Entry {
    std::string name;
    std::vector<std::int64_t> shape;
    std::int64_t byte_offset;
    std::int64_t byte_len;
  };
  std::vector<Entry> entries;
  for (const auto& e : get_required(header, "tensors")) {
    require_data(e.value("dtype", "") == "f32", "checkpoint: dtype must be f32");
    Entry ent;
    ent.name = get_required(e, "name").get<std::string>();
    ent.shape = get_required(e, "shape").get<std::vector<std::int64_t>>();
    ent.byte_offset = get_required(e, "byte_offset").get<std::int64_t>();
    ent.byte_len = get_required(e, "byte_len").get<std::int64_t>();
    std::int64_t n = 1;
    for (std::int64_t d : ent.shape) n *= d;
    require_data(ent.byte_len == n * 4, "checkpoint: byte_len does not match shape");
    require_data(ent.byte_offset >= 0 &&
                     ent.byte_offset + ent.byte_len <=
                         static_cast<std::int64_t>(blob.size()),
                 "checkpoint: tensor range outside blob");
    entries.push_back(std::move(ent));
  }

  auto read_values = [&](const Entry& e) {
    std::vector<double> vals(static_cast<std::size_t>(e.byte_len / 4));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      float f;
      std::memcpy(&f, blob.data() + e.byte_offset + static_cast<std::int64_t>(i) * 4,
                  sizeof(float));
      vals[i] = static_cast<double>(f);
    }
    return vals;
  };

  ItemIndexer indexer(items);
  if (kind == "pop") {
    require_data(entries.size() == 1 && entries[0].name == "scores",
                 "checkpoint: pop expects one 'scores' tensor");
    return std::make_unique<PopModel>(std::move(indexer), max_seq_len,
                                      read_values(entries[0]));
  }
  if (kind == "markov") {
    require_data(entries.size() == 1 && entries[0].name == "score_table",
                 "checkpoint: markov expects one 'score_table' tensor");
    return std::make_unique<MarkovModel>(std::move(indexer), max_seq_len,
                                         read_values(entries[0]));
  }

  Rng init_rng(0);
  std::unique_ptr<Ranker> model =
      make_neural_model(kind, std::move(indexer), max_seq_len, hyper, init_rng);
  std::vector<NamedTensor> params = named_parameters_of(*model);
  require_data(params.size() == entries.size(),
               "checkpoint: tensor count does not match model");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_data(params[i].name == entries[i].name,
                 "checkpoint: tensor name mismatch at " + entries[i].name);
    require_data(params[i].tensor.shape() == entries[i].shape,
                 "checkpoint: tensor shape mismatch at " + entries[i].name);
    params[i].tensor.data() = read_values(entries[i]);
  }
  return model;
}

}  // namespace seqrec
