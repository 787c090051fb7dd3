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

#include <string>

namespace cnat::model {

enum class DecodeMode { kNonAutoregressive, kAutoregressive };

std::string to_string(DecodeMode mode);
DecodeMode decode_mode_from_string(const std::string& text);

/// Architecture of the classifier-generator (and, with the decoder fields
/// reused, of the causal scorer LM and the judge encoder).
struct ModelConfig {
  int vocab_size = 0;
  int d_model = 128;
  int heads = 4;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int ffn_width = 512;
  int max_fertility = 3;
  int max_length = 96;
  double dropout = 0.1;
  int num_labels = 3;
  int label_hidden = 128;
  DecodeMode mode = DecodeMode::kNonAutoregressive;

  /// d=512, 8 heads, 6+6 layers, dropout 0.3.
  static ModelConfig full_scale(int vocab_size, int num_labels);
  /// d=128, 4 heads, 2+2 layers.
  static ModelConfig desk(int vocab_size, int num_labels);

  /// Raises InvalidArgument unless d is divisible by heads, max_fertility >= 1
  /// and num_labels >= 2.
  void validate() const;

  /// key=value lines; the textual block stored in checkpoints.
  std::string to_text() const;
  static ModelConfig from_text(const std::string& text);

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace cnat::model
