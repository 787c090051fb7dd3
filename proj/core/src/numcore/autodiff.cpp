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

#include "cnat/numcore/autodiff.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "cnat/error.hpp"

namespace cnat::num {
namespace {

thread_local bool g_grad_enabled = true;

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Mat<T>>;

template <typename T>
MatMap<T> as_matrix(Tensor<T>& t, int rows, int cols) {
  return MatMap<T>(t.data().data(), rows, cols);
}
template <typename T>
ConstMatMap<T> as_matrix(const Tensor<T>& t, int rows, int cols) {
  return ConstMatMap<T>(t.data().data(), rows, cols);
}

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) raise(code, what);
}

template <typename T>
void require_same_shape(const Var<T>& a, const Var<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    raise(ErrorCode::kShapeMismatch,
          std::string(op) + ": " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

template <typename T>
bool any_requires_grad(std::initializer_list<const Var<T>*> parents) {
  if (!g_grad_enabled) return false;
  for (const auto* p : parents) {
    if (p->defined() && p->requires_grad()) return true;
  }
  return false;
}

// Wraps a computed value as a graph node; records parents and the backward
// closure only when some parent is on a differentiable path.
template <typename T, typename Fn>
Var<T> make_result(Tensor<T> value, std::initializer_list<const Var<T>*> parents, Fn&& backward_fn) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  if (any_requires_grad<T>(parents)) {
    node->requires_grad = true;
    for (const auto* p : parents) node->parents.push_back(p->shared());
    node->backward_fn = std::forward<Fn>(backward_fn);
  }
  return Var<T>(std::move(node));
}

// Resolves a possibly negative axis and returns (outer, extent, inner).
struct AxisSplit {
  std::int64_t outer;
  int extent;
  std::int64_t inner;
};

AxisSplit split_axis(const Shape& shape, int axis) {
  const int rank = static_cast<int>(shape.size());
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) raise(ErrorCode::kShapeMismatch, "axis out of range for " + shape_string(shape));
  AxisSplit s{1, shape[static_cast<std::size_t>(axis)], 1};
  for (int i = 0; i < axis; ++i) s.outer *= shape[static_cast<std::size_t>(i)];
  for (int i = axis + 1; i < rank; ++i) s.inner *= shape[static_cast<std::size_t>(i)];
  return s;
}

}  // namespace

template <typename T>
Tensor<T>& Node<T>::ensure_grad() {
  if (grad.shape() != value.shape()) grad = Tensor<T>(value.shape());
  return grad;
}

template <typename T>
Var<T> Var<T>::constant(Tensor<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  return Var(std::move(node));
}

template <typename T>
Var<T> Var<T>::parameter(Tensor<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

template <typename T>
const Tensor<T>& Var<T>::grad() const {
  return node_->ensure_grad();
}

template <typename T>
void Var<T>::zero_grad() {
  node_->ensure_grad().fill(T(0));
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
void backward(const Var<T>& loss) {
  require(loss.defined() && loss.value().size() == 1, ErrorCode::kNonScalarLoss,
          "backward() needs a single-element loss, got " + (loss.defined() ? shape_string(loss.shape()) : "null"));
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node<T>* node : order) {
    if (!node->is_leaf()) node->ensure_grad().fill(T(0));
  }
  loss.node()->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (!node->is_leaf()) node->backward_fn(*node);
  }
}

// ---------------------------------------------------------------------------
// Linear algebra

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  require(a.value().rank() == 2 && b.value().rank() == 2 && a.cols() == b.rows(), ErrorCode::kShapeMismatch,
          "matmul " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor<T> out(Shape{m, n});
  as_matrix(out, m, n).noalias() = as_matrix(a.value(), m, k) * as_matrix(b.value(), k, n);
  auto* an = a.node();
  auto* bn = b.node();
  return make_result<T>(std::move(out), {&a, &b}, [an, bn, m, k, n](Node<T>& self) {
    auto g = as_matrix(std::as_const(self.grad), m, n);
    if (an->requires_grad) as_matrix(an->ensure_grad(), m, k).noalias() += g * as_matrix(std::as_const(bn->value), k, n).transpose();
    if (bn->requires_grad) as_matrix(bn->ensure_grad(), k, n).noalias() += as_matrix(std::as_const(an->value), m, k).transpose() * g;
  });
}

template <typename T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b) {
  require(a.value().rank() == 2 && b.value().rank() == 2 && a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          "matmul_nt " + shape_string(a.shape()) + " x " + shape_string(b.shape()) + "^T");
  const int m = a.rows(), k = a.cols(), n = b.rows();
  Tensor<T> out(Shape{m, n});
  as_matrix(out, m, n).noalias() = as_matrix(a.value(), m, k) * as_matrix(b.value(), n, k).transpose();
  auto* an = a.node();
  auto* bn = b.node();
  return make_result<T>(std::move(out), {&a, &b}, [an, bn, m, k, n](Node<T>& self) {
    auto g = as_matrix(std::as_const(self.grad), m, n);
    if (an->requires_grad) as_matrix(an->ensure_grad(), m, k).noalias() += g * as_matrix(std::as_const(bn->value), n, k);
    if (bn->requires_grad) as_matrix(bn->ensure_grad(), n, k).noalias() += g.transpose() * as_matrix(std::as_const(an->value), m, k);
  });
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
  require(a.value().rank() == 2, ErrorCode::kShapeMismatch, "transpose needs rank 2");
  const int m = a.rows(), n = a.cols();
  Tensor<T> out(Shape{n, m});
  as_matrix(out, n, m) = as_matrix(a.value(), m, n).transpose();
  auto* an = a.node();
  return make_result<T>(std::move(out), {&a}, [an, m, n](Node<T>& self) {
    as_matrix(an->ensure_grad(), m, n) += as_matrix(std::as_const(self.grad), n, m).transpose();
  });
}

// ---------------------------------------------------------------------------
// Elementwise

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "add");
  Tensor<T> out = a.value();
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  auto* an = a.node();
  auto* bn = b.node();
  return make_result<T>(std::move(out), {&a, &b}, [an, bn](Node<T>& self) {
    for (Node<T>* p : {an, bn}) {
      if (!p->requires_grad) continue;
      auto& g = p->ensure_grad();
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "sub");
  Tensor<T> out = a.value();
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  auto* an = a.node();
  auto* bn = b.node();
  return make_result<T>(std::move(out), {&a, &b}, [an, bn](Node<T>& self) {
    if (an->requires_grad) {
      auto& g = an->ensure_grad();
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      auto& g = bn->ensure_grad();
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "mul");
  Tensor<T> out = a.value();
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  auto* an = a.node();
  auto* bn = b.node();
  return make_result<T>(std::move(out), {&a, &b}, [an, bn](Node<T>& self) {
    if (an->requires_grad) {
      auto& g = an->ensure_grad();
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bn->value[i];
    }
    if (bn->requires_grad) {
      auto& g = bn->ensure_grad();
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * an->value[i];
    }
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
  Tensor<T> out = a.value();
  for (auto& v : out.data()) v *= factor;
  auto* an = a.node();
  return make_result<T>(std::move(out), {&a}, [an, factor](Node<T>& self) {
    auto& g = an->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
  });
}

template <typename T>
Var<T> add_bias(const Var<T>& a, const Var<T>& bias) {
  const int cols = a.cols();
  require(bias.value().size() == cols, ErrorCode::kShapeMismatch,
          "add_bias " + shape_string(a.shape()) + " + " + shape_string(bias.shape()));
  Tensor<T> out = a.value();
  const int rows = out.rows();
  for (int r = 0; r < rows; ++r) {
    auto row = out.row(r);
    for (int c = 0; c < cols; ++c) row[c] += bias.value()[c];
  }
  auto* an = a.node();
  auto* bn = bias.node();
  return make_result<T>(std::move(out), {&a, &bias}, [an, bn, rows, cols](Node<T>& self) {
    if (an->requires_grad) {
      auto& g = an->ensure_grad();
      for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      auto& g = bn->ensure_grad();
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) g[c] += self.grad.at(r, c);
      }
    }
  });
}

template <typename T>
Var<T> add_constant(const Var<T>& a, const Tensor<T>& c) {
  require(a.value().size() == c.size(), ErrorCode::kShapeMismatch,
          "add_constant " + shape_string(a.shape()) + " + " + shape_string(c.shape()));
  Tensor<T> out = a.value();
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] += c[i];
  auto* an = a.node();
  return make_result<T>(std::move(out), {&a}, [an](Node<T>& self) {
    auto& g = an->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
Var<T> relu(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& v : out.data()) v = v > T(0) ? v : T(0);
  auto* an = a.node();
  return make_result<T>(std::move(out), {&a}, [an](Node<T>& self) {
    auto& g = an->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) {
      if (an->value[i] > T(0)) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> gelu(const Var<T>& a) {
  // tanh approximation
  const T c = static_cast<T>(std::sqrt(2.0 / std::numbers::pi));
  Tensor<T> out = a.value();
  for (auto& v : out.data()) {
    const T x = v;
    v = T(0.5) * x * (T(1) + std::tanh(c * (x + T(0.044715) * x * x * x)));
  }
  auto* an = a.node();
  return make_result<T>(std::move(out), {&a}, [an, c](Node<T>& self) {
    auto& g = an->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) {
      const T x = an->value[i];
      const T inner = c * (x + T(0.044715) * x * x * x);
      const T th = std::tanh(inner);
      const T dinner = c * (T(1) + T(3) * T(0.044715) * x * x);
      const T d = T(0.5) * (T(1) + th) + T(0.5) * x * (T(1) - th * th) * dinner;
      g[i] += d * self.grad[i];
    }
  });
}

template <typename T>
Var<T> log(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& v : out.data()) v = std::log(v);
  auto* an = a.node();
  return make_result<T>(std::move(out), {&a}, [an](Node<T>& self) {
    auto& g = an->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / an->value[i];
  });
}

template <typename T>
Var<T> exp(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& v : out.data()) v = std::exp(v);
  auto* an = a.node();
  auto result = make_result<T>(std::move(out), {&a}, [an](Node<T>& self) {
    auto& g = an->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * self.value[i];
  });
  return result;
}

template <typename T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps) {
  const int cols = x.cols();
  const int rows = x.value().rows();
  require(gamma.value().size() == cols && beta.value().size() == cols, ErrorCode::kShapeMismatch,
          "layer_norm parameters must match the last extent");
  Tensor<T> out(x.shape());
  auto xhat = std::make_shared<std::vector<T>>(static_cast<std::size_t>(x.value().size()));
  auto inv_std = std::make_shared<std::vector<T>>(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    auto in = x.value().row(r);
    T mu = 0;
    for (T v : in) mu += v;
    mu /= static_cast<T>(cols);
    T var = 0;
    for (T v : in) var += (v - mu) * (v - mu);
    var /= static_cast<T>(cols);
    const T is = T(1) / std::sqrt(var + eps);
    (*inv_std)[static_cast<std::size_t>(r)] = is;
    for (int c = 0; c < cols; ++c) {
      const T h = (in[c] - mu) * is;
      (*xhat)[static_cast<std::size_t>(r) * cols + c] = h;
      out.at(r, c) = h * gamma.value()[c] + beta.value()[c];
    }
  }
  auto* xn = x.node();
  auto* gn = gamma.node();
  auto* bn = beta.node();
  return make_result<T>(std::move(out), {&x, &gamma, &beta},
                        [xn, gn, bn, xhat, inv_std, rows, cols](Node<T>& self) {
    if (gn->requires_grad || bn->requires_grad) {
      auto& gg = gn->ensure_grad();
      auto& bg = bn->ensure_grad();
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          const T dy = self.grad.at(r, c);
          if (gn->requires_grad) gg[c] += dy * (*xhat)[static_cast<std::size_t>(r) * cols + c];
          if (bn->requires_grad) bg[c] += dy;
        }
      }
    }
    if (!xn->requires_grad) return;
    auto& xg = xn->ensure_grad();
    std::vector<T> dxhat(static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
      T mean_d = 0, mean_dx = 0;
      for (int c = 0; c < cols; ++c) {
        const T d = self.grad.at(r, c) * gn->value[c];
        dxhat[static_cast<std::size_t>(c)] = d;
        mean_d += d;
        mean_dx += d * (*xhat)[static_cast<std::size_t>(r) * cols + c];
      }
      mean_d /= static_cast<T>(cols);
      mean_dx /= static_cast<T>(cols);
      const T is = (*inv_std)[static_cast<std::size_t>(r)];
      for (int c = 0; c < cols; ++c) {
        xg.at(r, c) += is * (dxhat[static_cast<std::size_t>(c)] - mean_d -
                             (*xhat)[static_cast<std::size_t>(r) * cols + c] * mean_dx);
      }
    }
  });
}

template <typename T>
Var<T> softmax(const Var<T>& x, int axis) {
  require(x.value().all_finite(), ErrorCode::kNonFiniteInput, "softmax input contains NaN or Inf");
  const AxisSplit s = split_axis(x.shape(), axis);
  Tensor<T> out(x.shape());
  const auto& in = x.value();
  for (std::int64_t o = 0; o < s.outer; ++o) {
    for (std::int64_t i = 0; i < s.inner; ++i) {
      const std::int64_t base = o * s.extent * s.inner + i;
      T mx = -std::numeric_limits<T>::infinity();
      for (int e = 0; e < s.extent; ++e) mx = std::max(mx, in[base + e * s.inner]);
      T total = 0;
      for (int e = 0; e < s.extent; ++e) {
        const T v = std::exp(in[base + e * s.inner] - mx);
        out[base + e * s.inner] = v;
        total += v;
      }
      for (int e = 0; e < s.extent; ++e) out[base + e * s.inner] /= total;
    }
  }
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn, s](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (std::int64_t o = 0; o < s.outer; ++o) {
      for (std::int64_t i = 0; i < s.inner; ++i) {
        const std::int64_t base = o * s.extent * s.inner + i;
        T dot = 0;
        for (int e = 0; e < s.extent; ++e) dot += self.grad[base + e * s.inner] * self.value[base + e * s.inner];
        for (int e = 0; e < s.extent; ++e) {
          const std::int64_t j = base + e * s.inner;
          g[j] += self.value[j] * (self.grad[j] - dot);
        }
      }
    }
  });
}

template <typename T>
Var<T> log_softmax(const Var<T>& x) {
  require(x.value().all_finite(), ErrorCode::kNonFiniteInput, "log_softmax input contains NaN or Inf");
  const int cols = x.cols();
  const int rows = x.value().rows();
  Tensor<T> out(x.shape());
  for (int r = 0; r < rows; ++r) {
    auto in = x.value().row(r);
    const T mx = *std::max_element(in.begin(), in.end());
    T total = 0;
    for (T v : in) total += std::exp(v - mx);
    const T lse = mx + std::log(total);
    for (int c = 0; c < cols; ++c) out.at(r, c) = in[c] - lse;
  }
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn, rows, cols](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (int r = 0; r < rows; ++r) {
      T gsum = 0;
      for (int c = 0; c < cols; ++c) gsum += self.grad.at(r, c);
      for (int c = 0; c < cols; ++c) g.at(r, c) += self.grad.at(r, c) - std::exp(self.value.at(r, c)) * gsum;
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

template <typename T>
Var<T> sum(const Var<T>& x) {
  T total = 0;
  for (T v : x.value().data()) total += v;
  auto* xn = x.node();
  return make_result<T>(Tensor<T>::scalar(total), {&x}, [xn](Node<T>& self) {
    auto& g = xn->ensure_grad();
    const T d = self.grad[0];
    for (auto& v : g.data()) v += d;
  });
}

template <typename T>
Var<T> mean(const Var<T>& x) {
  return scale(sum(x), T(1) / static_cast<T>(x.value().size()));
}

template <typename T>
Var<T> mean(const Var<T>& x, int axis) {
  const AxisSplit s = split_axis(x.shape(), axis);
  Shape out_shape;
  const int rank = x.value().rank();
  const int resolved = axis < 0 ? axis + rank : axis;
  for (int i = 0; i < rank; ++i) {
    if (i != resolved) out_shape.push_back(x.shape()[static_cast<std::size_t>(i)]);
  }
  if (out_shape.empty()) out_shape.push_back(1);
  Tensor<T> out(out_shape);
  const T inv = T(1) / static_cast<T>(s.extent);
  for (std::int64_t o = 0; o < s.outer; ++o) {
    for (std::int64_t i = 0; i < s.inner; ++i) {
      T total = 0;
      for (int e = 0; e < s.extent; ++e) total += x.value()[(o * s.extent + e) * s.inner + i];
      out[o * s.inner + i] = total * inv;
    }
  }
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn, s, inv](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (std::int64_t o = 0; o < s.outer; ++o) {
      for (std::int64_t i = 0; i < s.inner; ++i) {
        const T d = self.grad[o * s.inner + i] * inv;
        for (int e = 0; e < s.extent; ++e) g[(o * s.extent + e) * s.inner + i] += d;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Indexing

template <typename T>
Var<T> embedding_lookup(const Var<T>& table, std::span<const int> ids, int pad_id) {
  require(table.value().rank() == 2, ErrorCode::kShapeMismatch, "embedding table must be rank 2");
  const int vocab = table.rows();
  const int d = table.cols();
  require(!ids.empty(), ErrorCode::kEmptyInput, "embedding_lookup with no ids");
  Tensor<T> out(Shape{static_cast<int>(ids.size()), d});
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int id = ids[t];
    if (id < 0 || id >= vocab) {
      raise(ErrorCode::kBadTokenId, "token id " + std::to_string(id) + " outside vocabulary of " + std::to_string(vocab));
    }
    if (id == pad_id) continue;
    std::copy_n(table.value().row(id).begin(), d, out.row(static_cast<int>(t)).begin());
  }
  auto* tn = table.node();
  std::vector<int> idv(ids.begin(), ids.end());
  return make_result<T>(std::move(out), {&table}, [tn, idv = std::move(idv), pad_id, d](Node<T>& self) {
    auto& g = tn->ensure_grad();
    for (std::size_t t = 0; t < idv.size(); ++t) {
      if (idv[t] == pad_id) continue;
      auto dst = g.row(idv[t]);
      auto src = std::as_const(self.grad).row(static_cast<int>(t));
      for (int c = 0; c < d; ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
Var<T> gather_rows(const Var<T>& x, std::span<const int> rows) {
  const int n = x.value().rows();
  const int d = x.cols();
  Tensor<T> out(Shape{static_cast<int>(rows.size()), d});
  for (std::size_t t = 0; t < rows.size(); ++t) {
    require(rows[t] >= 0 && rows[t] < n, ErrorCode::kShapeMismatch, "gather_rows index out of range");
    std::copy_n(x.value().row(rows[t]).begin(), d, out.row(static_cast<int>(t)).begin());
  }
  auto* xn = x.node();
  std::vector<int> idx(rows.begin(), rows.end());
  return make_result<T>(std::move(out), {&x}, [xn, idx = std::move(idx), d](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (std::size_t t = 0; t < idx.size(); ++t) {
      auto dst = g.row(idx[t]);
      auto src = std::as_const(self.grad).row(static_cast<int>(t));
      for (int c = 0; c < d; ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
Var<T> slice_rows(const Var<T>& x, int begin, int end) {
  const int n = x.value().rows();
  const int d = x.cols();
  require(0 <= begin && begin < end && end <= n, ErrorCode::kShapeMismatch, "slice_rows range out of bounds");
  Tensor<T> out(Shape{end - begin, d});
  std::copy(x.value().data().begin() + static_cast<std::ptrdiff_t>(begin) * d,
            x.value().data().begin() + static_cast<std::ptrdiff_t>(end) * d, out.data().begin());
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn, begin, d](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (std::int64_t i = 0; i < self.grad.size(); ++i) g[static_cast<std::int64_t>(begin) * d + i] += self.grad[i];
  });
}

template <typename T>
Var<T> slice_cols(const Var<T>& x, int begin, int end) {
  const int n = x.value().rows();
  const int d = x.cols();
  require(0 <= begin && begin < end && end <= d, ErrorCode::kShapeMismatch, "slice_cols range out of bounds");
  const int w = end - begin;
  Tensor<T> out(Shape{n, w});
  for (int r = 0; r < n; ++r) std::copy_n(x.value().row(r).begin() + begin, w, out.row(r).begin());
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn, begin, w, n](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < w; ++c) g.at(r, begin + c) += self.grad.at(r, c);
    }
  });
}

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>>& parts) {
  require(!parts.empty(), ErrorCode::kShapeMismatch, "concat_rows of nothing");
  const int d = parts.front().cols();
  int total = 0;
  for (const auto& p : parts) {
    require(p.cols() == d, ErrorCode::kShapeMismatch, "concat_rows width mismatch");
    total += p.value().rows();
  }
  Tensor<T> out(Shape{total, d});
  auto dst = out.data().begin();
  bool needs_grad = false;
  for (const auto& p : parts) {
    dst = std::copy(p.value().data().begin(), p.value().data().end(), dst);
    needs_grad = needs_grad || p.requires_grad();
  }
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(out);
  if (g_grad_enabled && needs_grad) {
    node->requires_grad = true;
    for (const auto& p : parts) node->parents.push_back(p.shared());
    node->backward_fn = [](Node<T>& self) {
      std::int64_t offset = 0;
      for (auto& p : self.parents) {
        const std::int64_t n = p->value.size();
        if (p->requires_grad) {
          auto& g = p->ensure_grad();
          for (std::int64_t i = 0; i < n; ++i) g[i] += self.grad[offset + i];
        }
        offset += n;
      }
    };
  }
  return Var<T>(std::move(node));
}

template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape) {
  Tensor<T> out = x.value();
  out.reshape(std::move(shape));
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
Var<T> dropout(const Var<T>& x, double rate, Rng& rng, bool training) {
  if (!training || rate <= 0.0) return x;
  require(rate < 1.0, ErrorCode::kInvalidArgument, "dropout rate must be < 1");
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  auto mask = std::make_shared<std::vector<T>>(static_cast<std::size_t>(x.value().size()));
  Tensor<T> out = x.value();
  for (std::int64_t i = 0; i < out.size(); ++i) {
    const T m = rng.bernoulli(rate) ? T(0) : keep_scale;
    (*mask)[static_cast<std::size_t>(i)] = m;
    out[i] *= m;
  }
  auto* xn = x.node();
  return make_result<T>(std::move(out), {&x}, [xn, mask](Node<T>& self) {
    auto& g = xn->ensure_grad();
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * (*mask)[static_cast<std::size_t>(i)];
  });
}

template <typename T>
Var<T> multi_head_attention(const Var<T>& q, const Var<T>& k, const Var<T>& v, int heads,
                            const std::vector<std::uint8_t>* allowed, Tensor<T>* weights_out) {
  const int tq = q.rows();
  const int tk = k.rows();
  const int d = q.cols();
  require(k.cols() == d && v.cols() == d && v.rows() == tk && heads > 0 && d % heads == 0, ErrorCode::kShapeMismatch,
          "attention shapes q" + shape_string(q.shape()) + " k" + shape_string(k.shape()) + " v" + shape_string(v.shape()));
  require(allowed == nullptr || allowed->size() == static_cast<std::size_t>(tq) * tk, ErrorCode::kShapeMismatch,
          "attention mask size mismatch");
  const int dh = d / heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));

  auto probs = std::make_shared<std::vector<Mat<T>>>(static_cast<std::size_t>(heads));
  Tensor<T> out(Shape{tq, d});
  auto qm = as_matrix(q.value(), tq, d);
  auto km = as_matrix(k.value(), tk, d);
  auto vm = as_matrix(v.value(), tk, d);
  auto om = as_matrix(out, tq, d);
  for (int h = 0; h < heads; ++h) {
    Mat<T> scores = (qm.middleCols(h * dh, dh) * km.middleCols(h * dh, dh).transpose()) * inv_sqrt;
    for (int i = 0; i < tq; ++i) {
      T mx = -std::numeric_limits<T>::infinity();
      for (int j = 0; j < tk; ++j) {
        if (allowed && !(*allowed)[static_cast<std::size_t>(i) * tk + j]) continue;
        mx = std::max(mx, scores(i, j));
      }
      T total = 0;
      for (int j = 0; j < tk; ++j) {
        if (allowed && !(*allowed)[static_cast<std::size_t>(i) * tk + j]) {
          scores(i, j) = 0;
          continue;
        }
        scores(i, j) = std::exp(scores(i, j) - mx);
        total += scores(i, j);
      }
      if (total > 0) scores.row(i) /= total;
    }
    om.middleCols(h * dh, dh).noalias() = scores * vm.middleCols(h * dh, dh);
    (*probs)[static_cast<std::size_t>(h)] = std::move(scores);
  }
  if (weights_out) {
    *weights_out = Tensor<T>(Shape{heads, tq, tk});
    for (int h = 0; h < heads; ++h) {
      MatMap<T>(weights_out->data().data() + static_cast<std::ptrdiff_t>(h) * tq * tk, tq, tk) =
          (*probs)[static_cast<std::size_t>(h)];
    }
  }
  auto* qn = q.node();
  auto* kn = k.node();
  auto* vn = v.node();
  return make_result<T>(std::move(out), {&q, &k, &v},
                        [qn, kn, vn, probs, heads, tq, tk, d, dh, inv_sqrt](Node<T>& self) {
    auto g = as_matrix(std::as_const(self.grad), tq, d);
    auto qv = as_matrix(std::as_const(qn->value), tq, d);
    auto kv = as_matrix(std::as_const(kn->value), tk, d);
    auto vv = as_matrix(std::as_const(vn->value), tk, d);
    for (int h = 0; h < heads; ++h) {
      const Mat<T>& p = (*probs)[static_cast<std::size_t>(h)];
      auto go = g.middleCols(h * dh, dh);
      if (vn->requires_grad) as_matrix(vn->ensure_grad(), tk, d).middleCols(h * dh, dh).noalias() += p.transpose() * go;
      if (!qn->requires_grad && !kn->requires_grad) continue;
      Mat<T> dp = go * vv.middleCols(h * dh, dh).transpose();
      Mat<T> ds(tq, tk);
      for (int i = 0; i < tq; ++i) {
        const T dot = p.row(i).dot(dp.row(i));
        ds.row(i) = (p.row(i).array() * (dp.row(i).array() - dot)).matrix();
      }
      ds *= inv_sqrt;
      if (qn->requires_grad) as_matrix(qn->ensure_grad(), tq, d).middleCols(h * dh, dh).noalias() += ds * kv.middleCols(h * dh, dh);
      if (kn->requires_grad) as_matrix(kn->ensure_grad(), tk, d).middleCols(h * dh, dh).noalias() += ds.transpose() * qv.middleCols(h * dh, dh);
    }
  });
}

// ---------------------------------------------------------------------------
// Losses

template <typename T>
Var<T> cross_entropy_logits(const Var<T>& logits, std::span<const int> targets, int ignore_index) {
  const int classes = logits.cols();
  const int rows = logits.value().rows();
  require(static_cast<int>(targets.size()) == rows, ErrorCode::kLengthMismatch,
          "cross_entropy: " + std::to_string(targets.size()) + " targets for " + std::to_string(rows) + " rows");
  int counted = 0;
  for (int t : targets) {
    if (t == ignore_index) continue;
    if (t < 0 || t >= classes) {
      raise(ErrorCode::kBadTarget, "target " + std::to_string(t) + " outside " + std::to_string(classes) + " classes");
    }
    ++counted;
  }
  Var<T> logp = log_softmax(reshape(logits, Shape{rows, classes}));
  Tensor<T> selector(Shape{rows, classes});
  if (counted > 0) {
    for (int r = 0; r < rows; ++r) {
      if (targets[static_cast<std::size_t>(r)] != ignore_index) {
        selector.at(r, targets[static_cast<std::size_t>(r)]) = T(-1) / static_cast<T>(counted);
      }
    }
  }
  return sum(mul(logp, Var<T>::constant(std::move(selector))));
}

template <typename T>
Var<T> cross_entropy_probs(const Var<T>& probs, std::span<const int> targets) {
  const int classes = probs.cols();
  const int rows = probs.value().rows();
  require(static_cast<int>(targets.size()) == rows, ErrorCode::kLengthMismatch, "cross_entropy_probs row/target mismatch");
  std::vector<int> picks;
  for (int r = 0; r < rows; ++r) {
    const int t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= classes) {
      raise(ErrorCode::kBadTarget, "target " + std::to_string(t) + " outside " + std::to_string(classes) + " classes");
    }
    picks.push_back(r * classes + t);
  }
  Var<T> flat = reshape(probs, Shape{rows * classes, 1});
  Var<T> chosen = gather_rows(flat, picks);
  return scale(sum(log(chosen)), T(-1) / static_cast<T>(rows));
}

template <typename T>
double clip_grad_norm(std::span<Var<T>> params, double max_norm) {
  double total = 0;
  for (auto& p : params) {
    for (T g : p.grad().data()) total += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(total);
  if (norm > max_norm && norm > 0) {
    const T factor = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      for (auto& g : p.mutable_grad().data()) g *= factor;
    }
  }
  return norm;
}

// ---------------------------------------------------------------------------

#define CNAT_INSTANTIATE(T)                                                                          \
  template struct Node<T>;                                                                           \
  template class Var<T>;                                                                             \
  template void backward<T>(const Var<T>&);                                                          \
  template Var<T> matmul<T>(const Var<T>&, const Var<T>&);                                           \
  template Var<T> matmul_nt<T>(const Var<T>&, const Var<T>&);                                        \
  template Var<T> transpose<T>(const Var<T>&);                                                       \
  template Var<T> add<T>(const Var<T>&, const Var<T>&);                                              \
  template Var<T> sub<T>(const Var<T>&, const Var<T>&);                                              \
  template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                              \
  template Var<T> scale<T>(const Var<T>&, T);                                                        \
  template Var<T> add_bias<T>(const Var<T>&, const Var<T>&);                                         \
  template Var<T> add_constant<T>(const Var<T>&, const Tensor<T>&);                                  \
  template Var<T> relu<T>(const Var<T>&);                                                            \
  template Var<T> gelu<T>(const Var<T>&);                                                            \
  template Var<T> log<T>(const Var<T>&);                                                             \
  template Var<T> exp<T>(const Var<T>&);                                                             \
  template Var<T> layer_norm<T>(const Var<T>&, const Var<T>&, const Var<T>&, T);                     \
  template Var<T> softmax<T>(const Var<T>&, int);                                                    \
  template Var<T> log_softmax<T>(const Var<T>&);                                                     \
  template Var<T> sum<T>(const Var<T>&);                                                             \
  template Var<T> mean<T>(const Var<T>&);                                                            \
  template Var<T> mean<T>(const Var<T>&, int);                                                       \
  template Var<T> embedding_lookup<T>(const Var<T>&, std::span<const int>, int);                     \
  template Var<T> gather_rows<T>(const Var<T>&, std::span<const int>);                               \
  template Var<T> slice_rows<T>(const Var<T>&, int, int);                                            \
  template Var<T> slice_cols<T>(const Var<T>&, int, int);                                            \
  template Var<T> concat_rows<T>(const std::vector<Var<T>>&);                                        \
  template Var<T> reshape<T>(const Var<T>&, Shape);                                                  \
  template Var<T> dropout<T>(const Var<T>&, double, Rng&, bool);                                     \
  template Var<T> multi_head_attention<T>(const Var<T>&, const Var<T>&, const Var<T>&, int,          \
                                          const std::vector<std::uint8_t>*, Tensor<T>*);             \
  template Var<T> cross_entropy_logits<T>(const Var<T>&, std::span<const int>, int);                 \
  template Var<T> cross_entropy_probs<T>(const Var<T>&, std::span<const int>);                       \
  template double clip_grad_norm<T>(std::span<Var<T>>, double);

CNAT_INSTANTIATE(float)
CNAT_INSTANTIATE(double)

#undef CNAT_INSTANTIATE

}  // namespace cnat::num
