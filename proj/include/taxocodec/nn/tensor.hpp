/* Copyright 2026 The taxocodec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TAXOCODEC_NN_TENSOR_HPP_
#define TAXOCODEC_NN_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "taxocodec/error.hpp"

namespace txc::nn {

using Shape = std::vector<int>;

inline int64_t numel(const Shape& s) {
  int64_t n = 1;
  for (int d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "(";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

// Dense row-major tensor doubling as a reverse-mode autodiff node. Values are
// immutable once an op has produced the node; only `grad` accumulates during
// backward passes. Training runs with T=float, gradient checks with T=double.
template <typename T>
struct Tensor : std::enable_shared_from_this<Tensor<T>> {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // same length as data once touched; empty otherwise
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Tensor>> parents;
  std::function<void()> backward_fn;

  Tensor(Shape s, bool req) : shape(std::move(s)), requires_grad(req) {
    data.assign(static_cast<size_t>(numel(shape)), T(0));
  }
  Tensor(Shape s, std::vector<T> d, bool req) : shape(std::move(s)), data(std::move(d)), requires_grad(req) {
    require(static_cast<int64_t>(data.size()) == numel(shape), "SHAPE_MISMATCH",
            "tensor data length " + std::to_string(data.size()) + " vs shape " + shape_str(shape));
  }

  int64_t size() const { return static_cast<int64_t>(data.size()); }

  int dim(size_t i) const { return shape[i]; }

  T item() const {
    require(data.size() == 1, "SHAPE_MISMATCH", "item() on tensor of shape " + shape_str(shape));
    return data[0];
  }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
  }

  void zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), T(0));
  }

  bool all_finite() const {
    for (T v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  // Runs reverse-mode accumulation from this scalar node.
  void backward() {
    require(data.size() == 1, "SHAPE_MISMATCH", "backward() requires a scalar loss, got " + shape_str(shape));
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> seen;
    std::vector<std::pair<Tensor*, size_t>> stack;
    stack.emplace_back(this, 0);
    seen.insert(this);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->parents.size()) {
        Tensor* p = node->parents[next++].get();
        if (p->requires_grad && !seen.count(p)) {
          seen.insert(p);
          stack.emplace_back(p, 0);
        }
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
    ensure_grad();
    grad[0] = T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if ((*it)->backward_fn) (*it)->backward_fn();
    }
  }
};

template <typename T>
using TensorPtr = std::shared_ptr<Tensor<T>>;

template <typename T>
TensorPtr<T> make_tensor(Shape s, bool requires_grad = false) {
  return std::make_shared<Tensor<T>>(std::move(s), requires_grad);
}

template <typename T>
TensorPtr<T> make_tensor(Shape s, std::vector<T> data, bool requires_grad = false) {
  return std::make_shared<Tensor<T>>(std::move(s), std::move(data), requires_grad);
}

template <typename T>
TensorPtr<T> make_scalar(T v) {
  return make_tensor<T>({1}, std::vector<T>{v});
}

}  // namespace txc::nn

#endif  // TAXOCODEC_NN_TENSOR_HPP_
