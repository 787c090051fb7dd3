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

#include "cnat/model/config.hpp"

#include <map>
#include <sstream>

#include "cnat/error.hpp"

namespace cnat::model {

std::string to_string(DecodeMode mode) {
  return mode == DecodeMode::kAutoregressive ? "ar" : "nar";
}

DecodeMode decode_mode_from_string(const std::string& text) {
  if (text == "nar" || text == "NAR") return DecodeMode::kNonAutoregressive;
  if (text == "ar" || text == "AR") return DecodeMode::kAutoregressive;
  raise(ErrorCode::kInvalidArgument, "unknown decode mode '" + text + "'");
}

ModelConfig ModelConfig::full_scale(int vocab_size, int num_labels) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.num_labels = num_labels;
  c.d_model = 512;
  c.heads = 8;
  c.encoder_layers = 6;
  c.decoder_layers = 6;
  c.ffn_width = 2048;
  c.dropout = 0.3;
  c.label_hidden = 512;
  return c;
}

ModelConfig ModelConfig::desk(int vocab_size, int num_labels) {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.num_labels = num_labels;
  return c;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { raise(ErrorCode::kInvalidArgument, "model config: " + what); };
  if (vocab_size <= 0) fail("vocab_size must be positive");
  if (d_model <= 0 || heads <= 0 || d_model % heads != 0) fail("d_model must be a positive multiple of heads");
  if (encoder_layers < 0 || decoder_layers < 1) fail("need at least one decoder layer");
  if (ffn_width <= 0 || label_hidden <= 0) fail("widths must be positive");
  if (max_fertility < 1) fail("max_fertility must be >= 1");
  if (max_length < 1) fail("max_length must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
  if (num_labels < 2) fail("num_labels must be >= 2");
}

std::string ModelConfig::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "vocab_size=" << vocab_size << '\n'
     << "d_model=" << d_model << '\n'
     << "heads=" << heads << '\n'
     << "encoder_layers=" << encoder_layers << '\n'
     << "decoder_layers=" << decoder_layers << '\n'
     << "ffn_width=" << ffn_width << '\n'
     << "max_fertility=" << max_fertility << '\n'
     << "max_length=" << max_length << '\n'
     << "dropout=" << dropout << '\n'
     << "num_labels=" << num_labels << '\n'
     << "label_hidden=" << label_hidden << '\n'
     << "mode=" << to_string(mode) << '\n';
  return os.str();
}

ModelConfig ModelConfig::from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) raise(ErrorCode::kParse, "model config line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  ModelConfig c;
  auto get_int = [&](const char* key, int& out) {
    if (auto it = kv.find(key); it != kv.end()) out = std::stoi(it->second);
  };
  get_int("vocab_size", c.vocab_size);
  get_int("d_model", c.d_model);
  get_int("heads", c.heads);
  get_int("encoder_layers", c.encoder_layers);
  get_int("decoder_layers", c.decoder_layers);
  get_int("ffn_width", c.ffn_width);
  get_int("max_fertility", c.max_fertility);
  get_int("max_length", c.max_length);
  get_int("num_labels", c.num_labels);
  get_int("label_hidden", c.label_hidden);
  if (auto it = kv.find("dropout"); it != kv.end()) c.dropout = std::stod(it->second);
  if (auto it = kv.find("mode"); it != kv.end()) c.mode = decode_mode_from_string(it->second);
  c.validate();
  return c;
}

}  // namespace cnat::model
