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

#ifndef SEQREC_MODELS_CHECKPOINT_HPP_
#define SEQREC_MODELS_CHECKPOINT_HPP_

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "seqrec/models/ranker.hpp"
#include "seqrec/rng.hpp"

namespace seqrec {

// On-disk model format: one JSON header line
//   {"format_version":1,"kind":...,"config":{...},"tensors":[{name,shape,
//    dtype:"f32",byte_offset,byte_len},...]}
// followed by '\n' and a single blob of little-endian 32-bit floats. Values
// are stored f32; save(load(x)) reproduces x byte-exactly.

// Builds a neural model of the given kind from its hyperparameter object
// (fields documented per model in the README). Kinds: lr, mlp, gru, narm,
// sasrec, bert4rec.
std::unique_ptr<Ranker> make_neural_model(const std::string& kind, ItemIndexer indexer,
                                          std::int64_t max_seq_len,
                                          const nlohmann::json& hyper, Rng& init_rng);

// The model's hyperparameter object, and its named tensors (shared handles).
nlohmann::json hyper_json_of(const Ranker& model);
std::vector<NamedTensor> named_parameters_of(Ranker& model);

void save_model_checkpoint(const std::string& path, Ranker& model);
std::unique_ptr<Ranker> load_model_checkpoint(const std::string& path);

}  // namespace seqrec

#endif  // SEQREC_MODELS_CHECKPOINT_HPP_
