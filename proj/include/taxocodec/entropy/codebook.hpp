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

#ifndef TAXOCODEC_ENTROPY_CODEBOOK_HPP_
#define TAXOCODEC_ENTROPY_CODEBOOK_HPP_

#include <string>

#include "taxocodec/hash.hpp"
#include "taxocodec/nn/layers.hpp"

namespace txc::entropy {

// tau learnable spatial basis maps at a fixed reference resolution S x S.
// Priors are synthesized as per-channel linear combinations of the bases
// after bilinear re-sampling to the target resolution.
template <typename T>
struct Codebook {
  nn::Param<T> bases;  // (1, tau, S, S)
  int tau = 0;
  int s = 0;
  int n_channels = 0;  // synthesized prior channels

  Codebook() = default;
  Codebook(int tau_, int s_, int n_channels_, Rng& rng)
      : bases({1, tau_, s_, s_}), tau(tau_), s(s_), n_channels(n_channels_) {
    require(tau >= 1, "BAD_ARGUMENT", "codebook needs tau >= 1");
    require(s >= 2, "BAD_ARGUMENT", "codebook reference resolution must be >= 2");
    nn::init_uniform_fanin(bases, tau, rng);
  }

  // 32-bit content hash over the raw basis values; carried in every
  // bitstream header to refuse cross-model decoding.
  uint32_t content_hash() const {
    return fnv1a32(bases.value->data.data(), bases.value->data.size() * sizeof(T));
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) { set.add(prefix + ".bases", bases); }
};

// Z_l = sum_j a_j^l * resize(C_j), stacked over the n prior channels.
// coeffs is (N, n*tau) as produced by the coefficient decoder.
template <typename T>
nn::TensorPtr<T> synthesize_prior(const nn::TensorPtr<T>& coeffs, const Codebook<T>& codebook, int target_h,
                                  int target_w) {
  require(target_h >= 1 && target_w >= 1, "BAD_ARGUMENT",
          "synthesize_prior: target extent " + std::to_string(target_h) + "x" + std::to_string(target_w));
  auto resized = nn::bilinear_resize(codebook.bases.value, target_h, target_w);
  return nn::codebook_combine(coeffs, resized, codebook.n_channels, codebook.tau);
}

}  // namespace txc::entropy

#endif  // TAXOCODEC_ENTROPY_CODEBOOK_HPP_
