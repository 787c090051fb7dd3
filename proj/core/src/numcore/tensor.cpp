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

#include "cnat/numcore/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnat/error.hpp"

namespace cnat::num {

std::int64_t shape_size(const Shape& shape) {
  std::int64_t n = 1;
  for (int extent : shape) {
    if (extent <= 0) raise(ErrorCode::kShapeMismatch, "non-positive extent in shape " + shape_string(shape));
    n *= extent;
  }
  return shape.empty() ? 0 : n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill)
    : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_size(shape_)), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (static_cast<std::int64_t>(data_.size()) != shape_size(shape_)) {
    raise(ErrorCode::kShapeMismatch, "data length " + std::to_string(data_.size()) + " does not match shape " +
                                         shape_string(shape_));
  }
}

template <typename T>
Tensor<T> Tensor<T>::from_rows(const std::vector<std::vector<T>>& rows) {
  if (rows.empty() || rows.front().empty()) raise(ErrorCode::kShapeMismatch, "from_rows needs a non-empty matrix");
  const auto cols = rows.front().size();
  std::vector<T> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) raise(ErrorCode::kShapeMismatch, "ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Tensor(Shape{static_cast<int>(rows.size()), static_cast<int>(cols)}, std::move(flat));
}

template <typename T>
void Tensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
void Tensor<T>::reshape(Shape shape) {
  if (shape_size(shape) != size()) {
    raise(ErrorCode::kShapeMismatch, "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  shape_ = std::move(shape);
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace cnat::num
