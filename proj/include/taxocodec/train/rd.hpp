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

#ifndef TAXOCODEC_TRAIN_RD_HPP_
#define TAXOCODEC_TRAIN_RD_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "taxocodec/error.hpp"

namespace txc::train {

// One rate-distortion training run configuration.
struct RDConfig {
  std::vector<double> lambdas;  // one Lagrange multiplier per supervised task
  int steps = 600;
  int batch = 8;
  uint64_t seed = 1;
  bool rate_term_enabled = true;  // false = control group
  double lr = 1e-3;
  int val_every = 100;
  int val_samples = 48;
  int source_pixels = 64 * 64;  // bpp reference resolution

  void validate() const {
    bool any_positive = false;
    for (double l : lambdas) {
      require(l >= 0.0, "BAD_CONFIG", "lambda must be non-negative");
      any_positive = any_positive || l > 0.0;
    }
    require(any_positive || rate_term_enabled, "BAD_CONFIG",
            "at least one lambda must be positive or the rate term enabled");
    require(steps >= 0 && batch >= 1, "BAD_CONFIG", "bad step/batch configuration");
  }
};

// L = L_R + sum_i lambda_i * L_d_i, with L_R the mean bits per source pixel
// over the batch. `bits_per_item` is the batch-mean coding cost of one item.
double rd_loss(double bits_per_item, const std::vector<double>& distortions, const RDConfig& cfg);

// One evaluated model on the rate-distortion plane.
struct RDPoint {
  double bpp = 0.0;
  std::vector<double> distortions;  // task metrics, aligned with the task list
  std::vector<double> lambdas;
  uint64_t seed = 0;
};

struct RDCurve {
  std::vector<RDPoint> points;
};

// Minimal bpp among points whose every distortion is within (1+eps) of the
// control for lower-better metrics, or at least (1-eps) of the control for
// higher-better ones. nullopt when no point qualifies.
std::optional<double> plateau_search(const RDCurve& curve, const std::vector<double>& control_distortion,
                                     const std::vector<bool>& higher_better, double eps);

}  // namespace txc::train

#endif  // TAXOCODEC_TRAIN_RD_HPP_
