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

#ifndef TAXOCODEC_NN_GRAD_CHECK_HPP_
#define TAXOCODEC_NN_GRAD_CHECK_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "taxocodec/nn/param.hpp"

namespace txc::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int64_t worst_index = -1;
  bool pass = false;
};

namespace detail {

inline std::vector<std::vector<double>> reverse_mode_grads(const std::function<TensorPtr<double>()>& f,
                                                           const ParamSet<double>& params) {
  params.zero_grad();
  auto loss = f();
  require(std::isfinite(loss->item()), "NON_FINITE", "grad_check: loss is not finite at the base point");
  loss->backward();
  std::vector<std::vector<double>> grads;
  for (const auto& it : params.items()) {
    auto& node = *it.param->value;
    node.ensure_grad();
    grads.push_back(node.grad);
  }
  return grads;
}

inline double central_difference(const std::function<TensorPtr<double>()>& f, std::vector<double>& values, size_t j,
                                 double eps, const std::string& name) {
  const double saved = values[j];
  values[j] = saved + eps;
  const double up = f()->item();
  values[j] = saved - eps;
  const double down = f()->item();
  values[j] = saved;
  if (!std::isfinite(up) || !std::isfinite(down)) {
    fail("NON_FINITE", "grad_check: non-finite loss when perturbing " + name + "[" + std::to_string(j) + "]");
  }
  return (up - down) / (2.0 * eps);
}

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max(std::abs(analytic) + std::abs(numeric), 1e-8);
  return std::abs(analytic - numeric) / denom;
}

}  // namespace detail

// Compares reverse-mode gradients against central finite differences in
// double precision at a single step size. `f` must rebuild the graph from the
// current parameter values on every call.
inline GradCheckReport grad_check(const std::function<TensorPtr<double>()>& f, const ParamSet<double>& params,
                                  double eps = 1e-4, double tol = 1e-4) {
  const auto analytic = detail::reverse_mode_grads(f, params);
  GradCheckReport report;
  size_t pi = 0;
  for (const auto& it : params.items()) {
    auto& values = it.param->value->data;
    for (size_t j = 0; j < values.size(); ++j) {
      const double numeric = detail::central_difference(f, values, j, eps, it.name);
      const double rel = detail::relative_error(analytic[pi][j], numeric);
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = it.name;
        report.worst_index = static_cast<int64_t>(j);
      }
    }
    ++pi;
  }
  report.pass = report.max_rel_error <= tol;
  return report;
}

// Kink-aware variant for compositions with piecewise-linear activations: a
// perturbation window that straddles a ReLU (or PMF-floor) kink makes the
// finite-difference oracle itself unreliable, so elements failing at `eps`
// are re-measured with the window shrunk until it no longer crosses the kink.
inline GradCheckReport grad_check_adaptive(const std::function<TensorPtr<double>()>& f, const ParamSet<double>& params,
                                           double eps = 1e-5, double tol = 1e-4, int refinements = 2) {
  const auto analytic = detail::reverse_mode_grads(f, params);
  GradCheckReport report;
  size_t pi = 0;
  for (const auto& it : params.items()) {
    auto& values = it.param->value->data;
    for (size_t j = 0; j < values.size(); ++j) {
      double step = eps;
      double rel = detail::relative_error(analytic[pi][j], detail::central_difference(f, values, j, step, it.name));
      for (int r = 0; r < refinements && rel > tol; ++r) {
        step *= 0.25;
        rel = std::min(rel,
                       detail::relative_error(analytic[pi][j], detail::central_difference(f, values, j, step, it.name)));
      }
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = it.name;
        report.worst_index = static_cast<int64_t>(j);
      }
    }
    ++pi;
  }
  report.pass = report.max_rel_error <= tol;
  return report;
}

}  // namespace txc::nn

#endif  // TAXOCODEC_NN_GRAD_CHECK_HPP_
