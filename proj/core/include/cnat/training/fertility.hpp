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

#include <span>
#include <vector>

namespace cnat::training {

/// Training fertilities for a source of `source_length` tokens and a target
/// of `target_length` tokens. With an alignment (one source index per target
/// token) each source position counts its aligned tokens, clipped to
/// `max_fertility` with the excess carried to the right (and back from the
/// end when it runs off). Without one the target is spread uniformly.
/// Always sums to target_length. Raises InfeasibleLength when
/// target_length > source_length * max_fertility.
std::vector<int> target_fertility(int source_length, int target_length, int max_fertility,
                                  std::span<const int> alignment = {});

}  // namespace cnat::training
