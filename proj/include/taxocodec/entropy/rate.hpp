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

#ifndef TAXOCODEC_ENTROPY_RATE_HPP_
#define TAXOCODEC_ENTROPY_RATE_HPP_

#include <vector>

#include "taxocodec/entropy/alphabet.hpp"
#include "taxocodec/entropy/pmf.hpp"
#include "taxocodec/nn/ops.hpp"

namespace txc::entropy {

// Eval-side conditional parameters, one (mu, sigma) pair per latent element.
struct GaussianParams {
  std::vector<float> mu;
  std::vector<float> sigma;  // strictly positive
  nn::Shape shape;
};

// Total coding cost estimate in bits under the factorization
// p(z) = p(v) p(z|v): sum of -log2 q(z_k | mu_k, sigma_k) over the latent
// plus -log2 q(v_j | 0, sigma_j) over the hyper vector, using the same
// discretized PMFs the coder builds its tables from.
double rate_bits_eval(const QuantizedLatent& z, const HyperVector& v, const GaussianParams& params);

// Training-mode analogue evaluated at the noisy proxies via the interval
// integral; differentiable w.r.t. the latents, the predicted parameters and
// the hyper scales. Returns total bits over the whole batch.
template <typename T>
nn::TensorPtr<T> rate_bits_train(const nn::TensorPtr<T>& z_noisy, const nn::TensorPtr<T>& mu,
                                 const nn::TensorPtr<T>& sigma, const nn::TensorPtr<T>& v_noisy,
                                 const nn::TensorPtr<T>& hyper_sigma) {
  auto z_bits = nn::sum(nn::interval_nll_bits(z_noisy, mu, sigma));
  auto v_mu = nn::make_tensor<T>(v_noisy->shape);
  auto v_sigma = nn::broadcast_rows(hyper_sigma, v_noisy->dim(0));
  auto v_bits = nn::sum(nn::interval_nll_bits(v_noisy, v_mu, v_sigma));
  return nn::add(z_bits, v_bits);
}

}  // namespace txc::entropy

#endif  // TAXOCODEC_ENTROPY_RATE_HPP_
