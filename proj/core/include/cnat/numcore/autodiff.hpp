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

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "cnat/numcore/rng.hpp"
#include "cnat/numcore/tensor.hpp"

namespace cnat::num {

template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return !backward_fn; }
  Tensor<T>& ensure_grad();
};

/// Handle to a node of the reverse-mode differentiation graph. Copies share
/// the node.
template <typename T>
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Var constant(Tensor<T> value);
  /// Trainable leaf; backward() accumulates into its grad.
  static Var parameter(Tensor<T> value);

  bool defined() const { return node_ != nullptr; }
  const Tensor<T>& value() const { return node_->value; }
  Tensor<T>& mutable_value() { return node_->value; }
  /// Zero-filled when nothing has flowed back yet.
  const Tensor<T>& grad() const;
  Tensor<T>& mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool flag) { node_->requires_grad = flag; }

  const Shape& shape() const { return node_->value.shape(); }
  int rows() const { return node_->value.rows(); }
  int cols() const { return node_->value.cols(); }
  T item() const { return node_->value[0]; }

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Graph recording switch, per thread. Inference runs with recording off so
/// frozen parameters are only ever read.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Populates d(loss)/d(leaf) for every leaf on a differentiable path.
/// Leaf grads accumulate across calls; intermediate grads are recomputed.
template <typename T>
void backward(const Var<T>& loss);

// Linear algebra.
template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);
/// a * b^T.
template <typename T> Var<T> matmul_nt(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> transpose(const Var<T>& a);

// Elementwise.
template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> scale(const Var<T>& a, T factor);
/// Adds a length-cols bias to every row.
template <typename T> Var<T> add_bias(const Var<T>& a, const Var<T>& bias);
/// Adds a fixed tensor; no gradient flows into it.
template <typename T> Var<T> add_constant(const Var<T>& a, const Tensor<T>& c);
template <typename T> Var<T> relu(const Var<T>& a);
template <typename T> Var<T> gelu(const Var<T>& a);
template <typename T> Var<T> log(const Var<T>& a);
template <typename T> Var<T> exp(const Var<T>& a);

template <typename T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps = T(1e-5));

/// Max-subtracted softmax along `axis`. Non-finite input raises NonFiniteInput.
template <typename T> Var<T> softmax(const Var<T>& x, int axis = -1);
/// Log-softmax along the last axis.
template <typename T> Var<T> log_softmax(const Var<T>& x);

// Reductions.
template <typename T> Var<T> sum(const Var<T>& x);
template <typename T> Var<T> mean(const Var<T>& x);
/// Mean along `axis`; the axis is dropped from the result shape.
template <typename T> Var<T> mean(const Var<T>& x, int axis);

// Indexing.
/// Row gather; gradient scatters additively. Rows equal to `pad_id` read as
/// zeros and receive no gradient.
template <typename T>
Var<T> embedding_lookup(const Var<T>& table, std::span<const int> ids, int pad_id = -1);
template <typename T> Var<T> gather_rows(const Var<T>& x, std::span<const int> rows);
template <typename T> Var<T> slice_rows(const Var<T>& x, int begin, int end);
template <typename T> Var<T> slice_cols(const Var<T>& x, int begin, int end);
template <typename T> Var<T> concat_rows(const std::vector<Var<T>>& parts);
template <typename T> Var<T> reshape(const Var<T>& x, Shape shape);

/// Inverted dropout. The identity when `training` is false or rate is 0.
template <typename T> Var<T> dropout(const Var<T>& x, double rate, Rng& rng, bool training);

/// Scaled dot-product attention over `heads` column groups of q/k/v.
/// `allowed` (rows(q) x rows(k), row-major) masks keys out when 0.
/// When `weights_out` is given it receives heads x rows(q) x rows(k) weights.
template <typename T>
Var<T> multi_head_attention(const Var<T>& q, const Var<T>& k, const Var<T>& v, int heads,
                            const std::vector<std::uint8_t>* allowed = nullptr,
                            Tensor<T>* weights_out = nullptr);

// Losses.
/// Mean over rows of -log softmax(logits)[target]; rows whose target equals
/// `ignore_index` are skipped. A rank-1 input is one row.
template <typename T>
Var<T> cross_entropy_logits(const Var<T>& logits, std::span<const int> targets, int ignore_index = -1);
/// Mean over rows of -log probs[target].
template <typename T>
Var<T> cross_entropy_probs(const Var<T>& probs, std::span<const int> targets);

/// Scales every grad so the global L2 norm is at most max_norm. Returns the
/// pre-clipping norm.
template <typename T>
double clip_grad_norm(std::span<Var<T>> params, double max_norm);

}  // namespace cnat::num
