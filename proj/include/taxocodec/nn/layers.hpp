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

#ifndef TAXOCODEC_NN_LAYERS_HPP_
#define TAXOCODEC_NN_LAYERS_HPP_

#include <cmath>
#include <string>

#include "taxocodec/nn/param.hpp"
#include "taxocodec/rng.hpp"

namespace txc::nn {

// Seeded uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <typename T>
void init_uniform_fanin(Param<T>& p, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : p.value->data) v = static_cast<T>(rng.next_uniform(-bound, bound));
}

template <typename T>
struct Conv2dLayer {
  Param<T> w, b;
  int stride = 1, pad = 1;

  Conv2dLayer() = default;
  Conv2dLayer(int in_ch, int out_ch, int k, int stride_, int pad_, Rng& rng)
      : w({out_ch, in_ch, k, k}), b({out_ch}), stride(stride_), pad(pad_) {
    init_uniform_fanin(w, in_ch * k * k, rng);
    init_uniform_fanin(b, in_ch * k * k, rng);
  }

  TensorPtr<T> forward(const TensorPtr<T>& x) const { return conv2d(x, w.value, b.value, stride, pad); }

  void collect(ParamSet<T>& set, const std::string& prefix) {
    set.add(prefix + ".w", w);
    set.add(prefix + ".b", b);
  }
};

template <typename T>
struct LinearLayer {
  Param<T> w, b;

  LinearLayer() = default;
  LinearLayer(int in_f, int out_f, Rng& rng) : w({out_f, in_f}), b({out_f}) {
    init_uniform_fanin(w, in_f, rng);
    init_uniform_fanin(b, in_f, rng);
  }

  TensorPtr<T> forward(const TensorPtr<T>& x) const { return linear(x, w.value, b.value); }

  void collect(ParamSet<T>& set, const std::string& prefix) {
    set.add(prefix + ".w", w);
    set.add(prefix + ".b", b);
  }
};

// Two-layer perceptron with a ReLU in between.
template <typename T>
struct Mlp2 {
  LinearLayer<T> l0, l1;

  Mlp2() = default;
  Mlp2(int in_f, int hidden, int out_f, Rng& rng) : l0(in_f, hidden, rng), l1(hidden, out_f, rng) {}

  TensorPtr<T> forward(const TensorPtr<T>& x) const { return l1.forward(relu(l0.forward(x))); }

  void collect(ParamSet<T>& set, const std::string& prefix) {
    l0.collect(set, prefix + ".l0");
    l1.collect(set, prefix + ".l1");
  }
};

}  // namespace txc::nn

#endif  // TAXOCODEC_NN_LAYERS_HPP_
