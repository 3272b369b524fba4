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

#ifndef TAXOCODEC_NN_PARAM_HPP_
#define TAXOCODEC_NN_PARAM_HPP_

#include <string>
#include <vector>

#include "taxocodec/hash.hpp"
#include "taxocodec/nn/ops.hpp"
#include "taxocodec/nn/tensor.hpp"

namespace txc::nn {

inline constexpr double kScaleEps = 1e-6;

// A named trainable tensor. Positivity-flagged parameters store a free value
// and expose softplus(value) + 1e-6, which keeps scales strictly positive
// without constraint handling.
template <typename T>
struct Param {
  TensorPtr<T> value;
  bool trainable = true;
  bool positivity = false;

  Param() = default;
  Param(Shape shape, bool trainable_ = true, bool positivity_ = false)
      : value(make_tensor<T>(std::move(shape), trainable_)), trainable(trainable_), positivity(positivity_) {}

  // Graph view of the parameter; applies the positivity map when flagged.
  TensorPtr<T> effective() const {
    return positivity ? add_scalar(softplus(value), static_cast<T>(kScaleEps)) : value;
  }

  void set_trainable(bool t) {
    trainable = t;
    value->requires_grad = t;
  }
};

template <typename T>
struct NamedParam {
  std::string name;
  Param<T>* param;
};

// Flat, ordered registry of a model's parameters; the order is the canonical
// one used by the optimizer, checkpoints and group hashes.
template <typename T>
class ParamSet {
 public:
  void add(const std::string& name, Param<T>& p) { items_.push_back({name, &p}); }

  const std::vector<NamedParam<T>>& items() const { return items_; }
  size_t size() const { return items_.size(); }

  std::vector<Param<T>*> params() const {
    std::vector<Param<T>*> out;
    out.reserve(items_.size());
    for (const auto& it : items_) out.push_back(it.param);
    return out;
  }

  void zero_grad() const {
    for (const auto& it : items_) it.param->value->zero_grad();
  }

  // Content hash of all parameter values in registry order.
  uint64_t content_hash() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& it : items_) {
      h = fnv1a64(it.name.data(), it.name.size(), h);
      h = fnv1a64_values(it.param->value->data, h);
    }
    return h;
  }

 private:
  std::vector<NamedParam<T>> items_;
};

}  // namespace txc::nn

#endif  // TAXOCODEC_NN_PARAM_HPP_
