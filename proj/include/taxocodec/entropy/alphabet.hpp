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

#ifndef TAXOCODEC_ENTROPY_ALPHABET_HPP_
#define TAXOCODEC_ENTROPY_ALPHABET_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "taxocodec/error.hpp"
#include "taxocodec/nn/tensor.hpp"

namespace txc::entropy {

// Finite signed symbol set {t_min, ..., -1, 0, 1, ..., t_max}.
struct Alphabet {
  int t_min = -64;
  int t_max = 63;

  Alphabet() = default;
  Alphabet(int lo, int hi) : t_min(lo), t_max(hi) {
    require(t_min < 0 && 0 < t_max, "BAD_ALPHABET",
            "alphabet must straddle zero, got [" + std::to_string(t_min) + "," + std::to_string(t_max) + "]");
    require(size() <= 4096, "BAD_ALPHABET", "alphabet size " + std::to_string(size()) + " exceeds 4096");
  }

  int size() const { return t_max - t_min + 1; }
  bool contains(int s) const { return s >= t_min && s <= t_max; }
  int offset(int s) const { return s - t_min; }
  int symbol(int off) const { return off + t_min; }

  bool operator==(const Alphabet& o) const { return t_min == o.t_min && t_max == o.t_max; }
};

// Round half to even, the tie rule shared by every quantization site.
inline int round_half_even(double x) {
  const double fl = std::floor(x);
  const double frac = x - fl;
  if (frac > 0.5) return static_cast<int>(fl) + 1;
  if (frac < 0.5) return static_cast<int>(fl);
  const long long lo = static_cast<long long>(fl);
  return static_cast<int>((lo % 2 == 0) ? lo : lo + 1);
}

inline int quantize_value(double x, const Alphabet& a) {
  const int r = round_half_even(x);
  return r < a.t_min ? a.t_min : (r > a.t_max ? a.t_max : r);
}

// Integer latent plus its shape metadata.
struct QuantizedLatent {
  std::vector<int32_t> symbols;
  nn::Shape shape;  // (C,H,W)
  Alphabet alphabet;
};

// Spatial-dimension-free integer hyperprior with the per-element scales of
// its zero-mean Gaussian model.
struct HyperVector {
  std::vector<int32_t> symbols;
  Alphabet alphabet;
  std::vector<float> scales;  // strictly positive
};

// Eval-mode quantization: round half to even, then clamp into the alphabet.
// The training-time proxy is nn::add_uniform_noise.
inline std::vector<int32_t> quantize_eval(const std::vector<float>& values, const Alphabet& a) {
  std::vector<int32_t> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]), "NON_FINITE", "quantize: non-finite value at index " + std::to_string(i));
    out[i] = quantize_value(static_cast<double>(values[i]), a);
  }
  return out;
}

}  // namespace txc::entropy

#endif  // TAXOCODEC_ENTROPY_ALPHABET_HPP_
