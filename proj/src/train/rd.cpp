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

#include "taxocodec/train/rd.hpp"

#include <cmath>

namespace txc::train {

double rd_loss(double bits_per_item, const std::vector<double>& distortions, const RDConfig& cfg) {
  require(distortions.size() == cfg.lambdas.size(), "SHAPE_MISMATCH",
          "rd_loss: " + std::to_string(distortions.size()) + " distortions vs " + std::to_string(cfg.lambdas.size()) +
              " lambdas");
  double loss = cfg.rate_term_enabled ? bits_per_item / static_cast<double>(cfg.source_pixels) : 0.0;
  for (size_t i = 0; i < distortions.size(); ++i) loss += cfg.lambdas[i] * distortions[i];
  return loss;
}

std::optional<double> plateau_search(const RDCurve& curve, const std::vector<double>& control_distortion,
                                     const std::vector<bool>& higher_better, double eps) {
  require(!curve.points.empty(), "BAD_ARGUMENT", "plateau_search: empty curve");
  require(eps >= 0.0, "BAD_ARGUMENT", "plateau_search: eps must be non-negative");
  require(control_distortion.size() == higher_better.size(), "SHAPE_MISMATCH",
          "plateau_search: control/direction size mismatch");

  std::optional<double> best;
  for (const auto& point : curve.points) {
    require(point.distortions.size() == control_distortion.size(), "SHAPE_MISMATCH",
            "plateau_search: point distortion count mismatch");
    bool ok = true;
    for (size_t t = 0; t < control_distortion.size() && ok; ++t) {
      if (higher_better[t]) {
        ok = point.distortions[t] >= (1.0 - eps) * control_distortion[t];
      } else {
        ok = point.distortions[t] <= (1.0 + eps) * control_distortion[t];
      }
    }
    if (ok && (!best || point.bpp < *best)) best = point.bpp;
  }
  return best;
}

}  // namespace txc::train
