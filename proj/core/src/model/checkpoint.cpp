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

#include "cnat/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cnat/error.hpp"

namespace cnat::model {
namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) raise(ErrorCode::kParse, "checkpoint truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, std::uint32_t limit) {
  const auto n = get_u32(in);
  if (n > limit) raise(ErrorCode::kParse, "checkpoint string length " + std::to_string(n) + " is implausible");
  std::string s(n, '\0');
  if (!in.read(s.data(), n)) raise(ErrorCode::kParse, "checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const std::string& kind, const ModelConfig& config,
                      const ParameterSet<float>& params) {
  out.write(kCheckpointMagic, 5);
  put_string(out, "kind=" + kind + "\n" + config.to_text());
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    put_string(out, params.names()[i]);
    const auto& t = params.vars()[i].value();
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (int e : t.shape()) put_u32(out, static_cast<std::uint32_t>(e));
    for (float v : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) raise(ErrorCode::kIo, "failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[5];
  if (!in.read(magic, 5) || std::memcmp(magic, kCheckpointMagic, 5) != 0) {
    raise(ErrorCode::kParse, "not a checkpoint (bad magic)");
  }
  Checkpoint ck;
  std::string block = get_string(in, 1u << 20);
  const auto nl = block.find('\n');
  if (block.rfind("kind=", 0) != 0 || nl == std::string::npos) raise(ErrorCode::kParse, "checkpoint config block lacks kind");
  ck.kind = block.substr(5, nl - 5);
  ck.config = ModelConfig::from_text(block.substr(nl + 1));
  const auto count = get_u32(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = get_string(in, 4096);
    const auto rank = get_u32(in);
    if (rank == 0 || rank > 8) raise(ErrorCode::kParse, "bad rank for parameter " + name);
    num::Shape shape;
    for (std::uint32_t r = 0; r < rank; ++r) shape.push_back(static_cast<int>(get_u32(in)));
    Tensor<float> t(shape);
    for (auto& v : t.data()) v = std::bit_cast<float>(get_u32(in));
    ck.parameters.emplace_back(std::move(name), std::move(t));
  }
  return ck;
}

void write_checkpoint_file(const std::string& path, const std::string& kind, const ModelConfig& config,
                           const ParameterSet<float>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::kIo, "cannot open " + path + " for writing");
  write_checkpoint(out, kind, config, params);
}

Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIo, "cannot open " + path);
  return read_checkpoint(in);
}

void restore_parameters(ParameterSet<float>& params, const Checkpoint& checkpoint) {
  if (checkpoint.parameters.size() != params.size()) {
    raise(ErrorCode::kShapeMismatch, "checkpoint has " + std::to_string(checkpoint.parameters.size()) +
                                         " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, tensor] = checkpoint.parameters[i];
    if (name != params.names()[i] || tensor.shape() != params.vars()[i].shape()) {
      raise(ErrorCode::kShapeMismatch, "checkpoint tensor " + name + num::shape_string(tensor.shape()) +
                                           " does not match " + params.names()[i] +
                                           num::shape_string(params.vars()[i].shape()));
    }
    params.vars()[i].mutable_value() = tensor;
  }
}

void save_model(const std::string& path, const CnatModel<float>& model) {
  write_checkpoint_file(path, "cnat", model.config(), model.parameters());
}

CnatModel<float> load_model(const std::string& path) {
  auto ck = read_checkpoint_file(path);
  if (ck.kind != "cnat") raise(ErrorCode::kParse, path + " holds a '" + ck.kind + "' checkpoint, not a cnat model");
  CnatModel<float> model(ck.config, 0);
  restore_parameters(model.parameters(), ck);
  return model;
}

void save_language_model(const std::string& path, const LanguageModel<float>& lm) {
  write_checkpoint_file(path, "lm", lm.config(), lm.parameters());
}

LanguageModel<float> load_language_model(const std::string& path) {
  auto ck = read_checkpoint_file(path);
  if (ck.kind != "lm") raise(ErrorCode::kParse, path + " holds a '" + ck.kind + "' checkpoint, not a language model");
  LanguageModel<float> lm(ck.config, 0);
  restore_parameters(lm.parameters(), ck);
  return lm;
}

}  // namespace cnat::model
