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

#ifndef TAXOCODEC_CODER_CDF_HPP_
#define TAXOCODEC_CODER_CDF_HPP_

#include <cstdint>
#include <vector>

namespace txc::coder {

inline constexpr uint32_t kProbBits = 16;
inline constexpr uint32_t kProbTotal = 1u << kProbBits;

// Fixed-point cumulative counts over an alphabet: cum[0] = 0,
// cum[size] = 2^16, strictly increasing so every symbol is codable.
struct CdfTable {
  std::vector<uint32_t> cum;

  int size() const { return static_cast<int>(cum.size()) - 1; }
  uint32_t lo(int s) const { return cum[static_cast<size_t>(s)]; }
  uint32_t freq(int s) const { return cum[static_cast<size_t>(s) + 1] - cum[static_cast<size_t>(s)]; }
};

// Deterministic fixed-point scaling of a single-precision PMF with
// largest-remainder correction; totals hit 2^16 exactly and no count is zero.
// `expected_size`, when nonnegative, enforces the alphabet length.
CdfTable build_cdf(const std::vector<float>& pmf, int expected_size = -1);

}  // namespace txc::coder

#endif  // TAXOCODEC_CODER_CDF_HPP_
