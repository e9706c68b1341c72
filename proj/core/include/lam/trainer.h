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

#ifndef LAM_TRAINER_H_
#define LAM_TRAINER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lam/model.h"
#include "lam/tensor.h"

namespace lam {

struct TrainConfig {
  int epochs = 200;  // optimizer steps on the single seed
  double learning_rate = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 1e-4;
  int k_layers = 10;
  double alpha0 = 1.0;
  double eta0 = 0.1;
  // Adapter init: weights uniform in +-sca_init_scale/sqrt(N), bias constant.
  // The defaults leave every ReLU gate open at step 0 on unit-scale features.
  double sca_init_scale = 0.1;
  double sca_init_bias = 0.1;
  std::uint64_t rng_seed = 0;
  // Guidance mode stored in the trained model for labeling. Training itself
  // always steps against the seed ground truth.
  GuidanceMode mode = GuidanceMode::kSelf;

  void validate() const;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}

  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;
};

// Bias-corrected Adam with decoupled weight decay:
//   theta -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * theta)
// Decay applies where decay_mask is non-zero; an empty mask decays everything.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, const TrainConfig& config,
               std::span<const std::uint8_t> decay_mask = {});

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // ordered as LamModel::flatten()
};

// Oracle-guided forward pass, cross entropy against gt, and the full
// reverse pass through cascade and adapter.
LossAndGradient loss_and_gradient(const LamModel& model,
                                  const FeatureTensor& features,
                                  const LabelMap& gt);

// Forward only: cross_entropy(gt, O_K) with the cascade guided by gt.
double loss_eval(const LamModel& model, const FeatureTensor& features,
                 const LabelMap& gt);

struct TrainResult {
  LamModel model;
  // loss_history[e] is the seed loss after the update of epoch e.
  std::vector<double> loss_history;
  double initial_loss = 0.0;
};

LamModel init_model(int n_in, int class_count, const TrainConfig& config);

TrainResult train_from_seed(const FeatureTensor& seed_features,
                            const LabelMap& seed_gt, int class_count,
                            const TrainConfig& config);

}  // namespace lam

#endif  // LAM_TRAINER_H_
