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

#include "taxocodec/coder/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "taxocodec/error.hpp"

namespace txc::coder {

CdfTable build_cdf(const std::vector<float>& pmf, int expected_size) {
  const int n = static_cast<int>(pmf.size());
  require(n >= 1, "BAD_ARGUMENT", "build_cdf: empty pmf");
  if (expected_size >= 0) {
    require(n == expected_size, "SHAPE_MISMATCH", "build_cdf: pmf length " + std::to_string(n) +
                                                      " does not match alphabet size " + std::to_string(expected_size));
  }
  require(n <= static_cast<int>(kProbTotal), "BAD_ARGUMENT", "build_cdf: alphabet too large for 16-bit totals");

  double total = 0.0;
  for (float p : pmf) {
    require(p >= 0.0f && std::isfinite(p), "BAD_ARGUMENT", "build_cdf: pmf entries must be finite and non-negative");
    total += static_cast<double>(p);
  }
  require(std::abs(total - 1.0) <= 1e-6, "BAD_ARGUMENT",
          "build_cdf: pmf sums to " + std::to_string(total) + ", expected 1 within 1e-6");

  std::vector<uint64_t> counts(static_cast<size_t>(n));
  std::vector<double> remainders(static_cast<size_t>(n));
  uint64_t assigned = 0;
  for (int i = 0; i < n; ++i) {
    const double scaled = static_cast<double>(pmf[static_cast<size_t>(i)]) * kProbTotal;
    uint64_t c = static_cast<uint64_t>(std::floor(scaled));
    if (c == 0) c = 1;  // upstream flooring guarantees >= 2^-16, but never emit a zero count
    counts[static_cast<size_t>(i)] = c;
    remainders[static_cast<size_t>(i)] = scaled - std::floor(scaled);
    assigned += c;
  }

  // Distribute the residual one count at a time: deficits go to the largest
  // remainders (ties to the lower index), excess is taken from the smallest
  // remainders (ties to the higher index) among symbols with count > 1.
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (assigned < kProbTotal) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return remainders[static_cast<size_t>(a)] > remainders[static_cast<size_t>(b)];
    });
    uint64_t deficit = kProbTotal - assigned;
    size_t k = 0;
    while (deficit > 0) {
      counts[static_cast<size_t>(order[k % order.size()])] += 1;
      ++k;
      --deficit;
    }
  } else if (assigned > kProbTotal) {
    std::reverse(order.begin(), order.end());  // ties resolve to the higher index
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return remainders[static_cast<size_t>(a)] < remainders[static_cast<size_t>(b)];
    });
    uint64_t excess = assigned - kProbTotal;
    size_t k = 0;
    while (excess > 0) {
      const size_t idx = static_cast<size_t>(order[k % order.size()]);
      if (counts[idx] > 1) {
        counts[idx] -= 1;
        --excess;
      }
      ++k;
    }
  }

  CdfTable table;
  table.cum.resize(static_cast<size_t>(n) + 1);
  table.cum[0] = 0;
  for (int i = 0; i < n; ++i)
    table.cum[static_cast<size_t>(i) + 1] = table.cum[static_cast<size_t>(i)] + static_cast<uint32_t>(counts[static_cast<size_t>(i)]);
  require(table.cum.back() == kProbTotal, "INTERNAL", "build_cdf: counts do not reach 2^16");
  return table;
}

}  // namespace txc::coder
