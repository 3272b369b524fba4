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

#ifndef TAXOCODEC_ENTROPY_PMF_HPP_
#define TAXOCODEC_ENTROPY_PMF_HPP_

#include <vector>

#include "taxocodec/entropy/alphabet.hpp"

namespace txc::entropy {

inline constexpr double kPmfFloor = 1.0 / 65536.0;  // 2^-16

// Raw interval mass of one symbol, before flooring:
//   P(s) = Phi((s+0.5-mu)/sigma) - Phi((s-0.5-mu)/sigma)
// for interior symbols; the edge symbols absorb the remaining tail mass.
double gaussian_interval_prob(int symbol, double mu, double sigma, const Alphabet& alphabet);

// Discretized Gaussian over the alphabet built from the interval masses.
// Every entry is floored at 2^-16 with the surplus rebalanced, so the result
// sums to 1 within 1e-9 and every symbol stays codable.
std::vector<double> discretized_gaussian_pmf(double mu, double sigma, const Alphabet& alphabet);

// Pinned single-precision view handed to the CDF builder; encoder and
// decoder derive coding tables from identical float PMFs.
std::vector<float> pmf_to_float(const std::vector<double>& pmf);

// Coding cost in bits of one PMF entry: -log2 P(s).
double pmf_bits(const std::vector<double>& pmf, int offset);

}  // namespace txc::entropy

#endif  // TAXOCODEC_ENTROPY_PMF_HPP_
