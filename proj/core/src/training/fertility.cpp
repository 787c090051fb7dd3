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

#include "cnat/training/fertility.hpp"

#include <algorithm>
#include <string>

#include "cnat/error.hpp"
#include "cnat/model/cnat_model.hpp"

namespace cnat::training {

std::vector<int> target_fertility(int source_length, int target_length, int max_fertility,
                                  std::span<const int> alignment) {
  if (source_length < 1) raise(ErrorCode::kEmptyInput, "empty source");
  if (target_length > source_length * max_fertility) {
    raise(ErrorCode::kInfeasibleLength, "target of " + std::to_string(target_length) + " tokens exceeds " +
                                            std::to_string(source_length) + " x " + std::to_string(max_fertility));
  }
  if (alignment.empty()) return model::uniform_fertility(source_length, target_length, max_fertility);
  if (static_cast<int>(alignment.size()) != target_length) {
    raise(ErrorCode::kLengthMismatch, "alignment covers " + std::to_string(alignment.size()) + " of " +
                                          std::to_string(target_length) + " target tokens");
  }
  std::vector<int> f(static_cast<std::size_t>(source_length), 0);
  for (int s : alignment) {
    if (s < 0 || s >= source_length) {
      raise(ErrorCode::kInvalidArgument, "alignment index " + std::to_string(s) + " outside the source");
    }
    ++f[static_cast<std::size_t>(s)];
  }
  int carry = 0;
  for (auto& v : f) {
    v += carry;
    carry = std::max(0, v - max_fertility);
    v -= carry;
  }
  for (auto it = f.rbegin(); carry > 0 && it != f.rend(); ++it) {
    const int room = max_fertility - *it;
    const int moved = std::min(room, carry);
    *it += moved;
    carry -= moved;
  }
  return f;
}

}  // namespace cnat::training
