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

#include "taxocodec/entropy/pmf.hpp"

#include <cmath>

namespace txc::entropy {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

}  // namespace

double gaussian_interval_prob(int symbol, double mu, double sigma, const Alphabet& alphabet) {
  require(sigma > 0.0 && std::isfinite(sigma), "BAD_ARGUMENT",
          "gaussian_interval_prob: sigma must be positive, got " + std::to_string(sigma));
  require(alphabet.contains(symbol), "BAD_ARGUMENT", "symbol outside the alphabet");
  const double hi = (symbol == alphabet.t_max) ? 1.0 : std_normal_cdf((symbol + 0.5 - mu) / sigma);
  const double lo = (symbol == alphabet.t_min) ? 0.0 : std_normal_cdf((symbol - 0.5 - mu) / sigma);
  return std::max(hi - lo, 0.0);
}

std::vector<double> discretized_gaussian_pmf(double mu, double sigma, const Alphabet& alphabet) {
  require(sigma > 0.0 && std::isfinite(sigma), "BAD_ARGUMENT",
          "discretized_gaussian_pmf: sigma must be positive, got " + std::to_string(sigma));
  const int n = alphabet.size();
  std::vector<double> pmf(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    pmf[static_cast<size_t>(i)] = gaussian_interval_prob(alphabet.symbol(i), mu, sigma, alphabet);
  }

  // Floor at 2^-16, rescaling the remaining mass until no entry dips back
  // under the floor. The alphabet is capped at 4096 symbols, so the floored
  // mass can never exceed 1/16 and the loop always terminates.
  std::vector<bool> floored(static_cast<size_t>(n), false);
  double scale = 1.0;
  for (;;) {
    int n_floored = 0;
    double above = 0.0;
    for (int i = 0; i < n; ++i) {
      if (floored[static_cast<size_t>(i)])
        ++n_floored;
      else
        above += pmf[static_cast<size_t>(i)];
    }
    scale = (1.0 - kPmfFloor * n_floored) / above;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      if (!floored[static_cast<size_t>(i)] && pmf[static_cast<size_t>(i)] * scale < kPmfFloor) {
        floored[static_cast<size_t>(i)] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (int i = 0; i < n; ++i)
    pmf[static_cast<size_t>(i)] = floored[static_cast<size_t>(i)] ? kPmfFloor : pmf[static_cast<size_t>(i)] * scale;
  return pmf;
}

std::vector<float> pmf_to_float(const std::vector<double>& pmf) {
  std::vector<float> out(pmf.size());
  for (size_t i = 0; i < pmf.size(); ++i) out[i] = static_cast<float>(pmf[i]);
  return out;
}

double pmf_bits(const std::vector<double>& pmf, int offset) {
  require(offset >= 0 && offset < static_cast<int>(pmf.size()), "BAD_ARGUMENT",
          "pmf_bits: offset " + std::to_string(offset) + " outside pmf of size " + std::to_string(pmf.size()));
  return -std::log2(pmf[static_cast<size_t>(offset)]);
}

}  // namespace txc::entropy
