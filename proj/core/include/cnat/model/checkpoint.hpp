// Copyright 2026 The cnat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cnat/model/cnat_model.hpp"
#include "cnat/model/config.hpp"
#include "cnat/model/language_model.hpp"
#include "cnat/model/layers.hpp"

namespace cnat::model {

// Layout:
//   "CNAT1"
//   u32 length, then that many bytes of key=value text (kind=..., config)
//   u32 parameter count
//   per parameter: u32 name length, name, u32 rank, u32 extents..., f32 data
// All integers and floats little-endian.

inline constexpr char kCheckpointMagic[] = "CNAT1";

struct Checkpoint {
  std::string kind;
  ModelConfig config;
  std::vector<std::pair<std::string, Tensor<float>>> parameters;
};

void write_checkpoint(std::ostream& out, const std::string& kind, const ModelConfig& config,
                      const ParameterSet<float>& params);
Checkpoint read_checkpoint(std::istream& in);

void write_checkpoint_file(const std::string& path, const std::string& kind, const ModelConfig& config,
                           const ParameterSet<float>& params);
Checkpoint read_checkpoint_file(const std::string& path);

/// Copies checkpoint tensors into `params`; names, order and shapes must match.
void restore_parameters(ParameterSet<float>& params, const Checkpoint& checkpoint);

void save_model(const std::string& path, const CnatModel<float>& model);
CnatModel<float> load_model(const std::string& path);

void save_language_model(const std::string& path, const LanguageModel<float>& lm);
LanguageModel<float> load_language_model(const std::string& path);

}  // namespace cnat::model
