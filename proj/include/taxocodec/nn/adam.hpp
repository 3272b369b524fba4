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

#ifndef TAXOCODEC_NN_ADAM_HPP_
#define TAXOCODEC_NN_ADAM_HPP_

#include <cmath>
#include <vector>

#include "taxocodec/nn/param.hpp"

namespace txc::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam over an ordered parameter list. Only trainable parameters are stepped;
// parameters without an accumulated gradient in the current step are skipped.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Param<T>*> params, AdamConfig cfg = {}) : params_(std::move(params)), cfg_(cfg) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i]->value->data.size(), 0.0);
      v_[i].assign(params_[i]->value->data.size(), 0.0);
    }
  }

  void zero_grad() {
    for (auto* p : params_) p->value->zero_grad();
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& node = *params_[i]->value;
      if (!params_[i]->trainable || node.grad.empty()) continue;
      for (size_t j = 0; j < node.data.size(); ++j) {
        const double g = static_cast<double>(node.grad[j]);
        m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * g;
        v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m_[i][j] / bc1;
        const double vhat = v_[i][j] / bc2;
        node.data[j] -= static_cast<T>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
      }
    }
  }

  int64_t steps_taken() const { return t_; }

 private:
  std::vector<Param<T>*> params_;
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace txc::nn

#endif  // TAXOCODEC_NN_ADAM_HPP_
