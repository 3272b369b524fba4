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

#include "taxocodec/entropy/rate.hpp"

namespace txc::entropy {

double rate_bits_eval(const QuantizedLatent& z, const HyperVector& v, const GaussianParams& params) {
  require(params.mu.size() == z.symbols.size() && params.sigma.size() == z.symbols.size(), "SHAPE_MISMATCH",
          "rate_bits: conditional parameters do not match the latent size");
  require(v.scales.size() == v.symbols.size(), "SHAPE_MISMATCH", "rate_bits: hyper scales do not match v");
  double bits = 0.0;
  for (size_t k = 0; k < z.symbols.size(); ++k) {
    const auto pmf = discretized_gaussian_pmf(params.mu[k], params.sigma[k], z.alphabet);
    bits += pmf_bits(pmf, z.alphabet.offset(z.symbols[k]));
  }
  for (size_t j = 0; j < v.symbols.size(); ++j) {
    const auto pmf = discretized_gaussian_pmf(0.0, v.scales[j], v.alphabet);
    bits += pmf_bits(pmf, v.alphabet.offset(v.symbols[j]));
  }
  return bits;
}

}  // namespace txc::entropy
