/* Copyright 2026 The LAM Authors. All Rights Reserved.

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

#ifndef LAM_SCA_H_
#define LAM_SCA_H_

#include <cstdint>
#include <vector>

#include "lam/tensor.h"

namespace lam {

// Semantic class adapter: a 1x1 convolution from n_in backbone channels to
// n_out class channels followed by ReLU.
struct ScaParams {
  int n_in = 0;
  int n_out = 0;
  std::vector<double> weights;  // n_out x n_in, output-channel major
  std::vector<double> bias;     // n_out

  static ScaParams zeros(int n_in, int n_out);

  double weight(int out, int in) const {
    return weights[static_cast<std::size_t>(out) * n_in + in];
  }
  double& weight(int out, int in) {
    return weights[static_cast<std::size_t>(out) * n_in + in];
  }
  std::int64_t param_count() const;
  void validate() const;

  friend bool operator==(const ScaParams&, const ScaParams&) = default;
};

// (n_in + 1) * n_out: one weight per input channel plus the bias, per class.
std::int64_t sca_param_count(std::int64_t n_in, std::int64_t n_out);

// Weights uniform in +-scale/sqrt(n_in), bias filled with bias_init.
ScaParams init_sca_params(int n_in, int n_out, std::uint64_t rng_seed,
                          double scale = 1.0, double bias_init = 0.0);

// W x + b per pixel, before the ReLU.
FeatureTensor sca_preactivation(const FeatureTensor& features,
                                const ScaParams& params);

FeatureTensor sca_forward(const FeatureTensor& features,
                          const ScaParams& params);

struct ScaGradients {
  std::vector<double> weights;
  std::vector<double> bias;
  FeatureTensor input;
};

// Reverse pass of sca_forward. The ReLU passes gradient only where the
// cached preactivation is strictly positive.
ScaGradients sca_backward(const FeatureTensor& grad_out,
                          const FeatureTensor& cached_input,
                          const FeatureTensor& cached_preactivation,
                          const ScaParams& params);

}  // namespace lam

#endif  // LAM_SCA_H_
