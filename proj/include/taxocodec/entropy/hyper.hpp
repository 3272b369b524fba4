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

#ifndef TAXOCODEC_ENTROPY_HYPER_HPP_
#define TAXOCODEC_ENTROPY_HYPER_HPP_

#include <cmath>
#include <string>
#include <utility>

#include "taxocodec/entropy/codebook.hpp"
#include "taxocodec/nn/layers.hpp"

namespace txc::entropy {

// Per-element scales of the zero-mean Gaussian model of v. Stored through the
// positivity reparameterization; initialized so the exposed scale is ~1.
template <typename T>
struct HyperScales {
  nn::Param<T> raw;

  HyperScales() = default;
  explicit HyperScales(int j) : raw({j}, true, true) {
    const T init = static_cast<T>(std::log(std::exp(1.0) - 1.0));  // softplus^-1(1)
    for (auto& v : raw.value->data) v = init;
  }

  nn::TensorPtr<T> sigma() const { return raw.effective(); }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) { set.add(prefix + ".raw", raw); }
};

// Decodes the n coefficient sequences (each of length tau) from the
// J-dimensional hyper vector via a two-layer perceptron.
template <typename T>
struct CoefficientDecoder {
  nn::Mlp2<T> mlp;
  int j = 0, n_channels = 0, tau = 0;

  CoefficientDecoder() = default;
  CoefficientDecoder(int j_, int n_channels_, int tau_, Rng& rng)
      : mlp(j_, 4 * j_, n_channels_ * tau_, rng), j(j_), n_channels(n_channels_), tau(tau_) {}

  // v_real: (N, J) -> coefficients (N, n*tau).
  nn::TensorPtr<T> forward(const nn::TensorPtr<T>& v_real) const {
    require(v_real->shape.size() == 2 && v_real->dim(1) == j, "SHAPE_MISMATCH",
            "coefficient decoder expects (N," + std::to_string(j) + "), got " + nn::shape_str(v_real->shape));
    return mlp.forward(v_real);
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) { mlp.collect(set, prefix + ".mlp"); }
};

// Convolutional head mapping the synthesized prior to per-element mu and
// sigma of the conditional model q(z_k | v).
template <typename T>
struct PredictionHead {
  nn::Conv2dLayer<T> c0;  // prior_n -> hidden, 3x3
  nn::Conv2dLayer<T> c1;  // hidden -> 2*latent_channels, 1x1
  int prior_n = 0, latent_channels = 0;

  PredictionHead() = default;
  PredictionHead(int prior_n_, int hidden, int latent_channels_, Rng& rng)
      : c0(prior_n_, hidden, 3, 1, 1, rng),
        c1(hidden, 2 * latent_channels_, 1, 1, 0, rng),
        prior_n(prior_n_),
        latent_channels(latent_channels_) {}

  // prior: (N, prior_n, h, w) -> {mu, sigma}, each (N, latent_channels, h, w).
  std::pair<nn::TensorPtr<T>, nn::TensorPtr<T>> forward(const nn::TensorPtr<T>& prior) const {
    require(prior->shape.size() == 4 && prior->dim(1) == prior_n, "SHAPE_MISMATCH",
            "prediction head expects " + std::to_string(prior_n) + " prior channels, got " +
                nn::shape_str(prior->shape));
    auto both = c1.forward(nn::relu(c0.forward(prior)));
    auto mu = nn::slice_channels(both, 0, latent_channels);
    auto sigma_raw = nn::slice_channels(both, latent_channels, 2 * latent_channels);
    auto sigma = nn::add_scalar(nn::softplus(sigma_raw), static_cast<T>(nn::kScaleEps));
    return {mu, sigma};
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    c0.collect(set, prefix + ".c0");
    c1.collect(set, prefix + ".c1");
  }
};

// Perceptron head for latents without spatial dimensions: emits per-element
// mu and sigma directly from v.
template <typename T>
struct VectorParamHead {
  nn::Mlp2<T> mlp;
  int j = 0, out_len = 0;

  VectorParamHead() = default;
  VectorParamHead(int j_, int hidden, int out_len_, Rng& rng)
      : mlp(j_, hidden, 2 * out_len_, rng), j(j_), out_len(out_len_) {}

  // v_real: (N, J) -> {mu, sigma}, each (N, out_len).
  std::pair<nn::TensorPtr<T>, nn::TensorPtr<T>> forward(const nn::TensorPtr<T>& v_real) const {
    require(v_real->shape.size() == 2 && v_real->dim(1) == j, "SHAPE_MISMATCH",
            "vector head expects (N," + std::to_string(j) + "), got " + nn::shape_str(v_real->shape));
    auto both = mlp.forward(v_real);
    const int n = both->dim(0);
    auto as4 = nn::reshape(both, {n, 2 * out_len, 1, 1});
    auto mu = nn::reshape(nn::slice_channels(as4, 0, out_len), {n, out_len});
    auto sigma_raw = nn::reshape(nn::slice_channels(as4, out_len, 2 * out_len), {n, out_len});
    auto sigma = nn::add_scalar(nn::softplus(sigma_raw), static_cast<T>(nn::kScaleEps));
    return {mu, sigma};
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) { mlp.collect(set, prefix + ".mlp"); }
};

}  // namespace txc::entropy

#endif  // TAXOCODEC_ENTROPY_HYPER_HPP_
