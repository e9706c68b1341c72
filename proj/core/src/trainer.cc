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

#include "lam/trainer.h"

#include <cmath>
#include <string>

#include "lam/errors.h"
#include "lam/optou.h"
#include "lam/sca.h"

namespace lam {
namespace {

void check_seed(const LamModel& model, const FeatureTensor& features,
                const LabelMap& gt) {
  model.validate();
  if (features.channels() != model.sca.n_in) {
    throw ShapeError("features have " + std::to_string(features.channels()) +
                     " channels, model expects " +
                     std::to_string(model.sca.n_in));
  }
  if (gt.height() != features.height() || gt.width() != features.width()) {
    throw ShapeError("ground truth does not match the feature resolution");
  }
  gt.validate(model.class_count);
  if (gt.valid_count() == 0) {
    throw DegenerateInputError("ground truth has no labeled pixels");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidInputError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidInputError("learning rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InvalidInputError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw InvalidInputError("Adam eps must be > 0");
  if (!(weight_decay >= 0.0)) throw InvalidInputError("weight decay must be >= 0");
  if (k_layers < 1) throw InvalidInputError("k_layers must be >= 1");
  if (!std::isfinite(alpha0) || !std::isfinite(eta0)) {
    throw InvalidInputError("alpha0 and eta0 must be finite");
  }
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, const TrainConfig& config,
               std::span<const std::uint8_t> decay_mask) {
  if (grads.size() != params.size() ||
      state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and state sizes differ");
  }
  if (!decay_mask.empty() && decay_mask.size() != params.size()) {
    throw ShapeError("adam_step: decay mask size differs from parameters");
  }
  ++state.step;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = b1 * m + (1.0 - b1) * grads[i];
    v = b2 * v + (1.0 - b2) * grads[i] * grads[i];
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    double update = m_hat / (std::sqrt(v_hat) + config.adam_eps);
    if (decay_mask.empty() || decay_mask[i] != 0) {
      update += config.weight_decay * params[i];
    }
    params[i] -= config.learning_rate * update;
  }
}

LossAndGradient loss_and_gradient(const LamModel& model,
                                  const FeatureTensor& features,
                                  const LabelMap& gt) {
  check_seed(model, features, gt);
  const FeatureTensor pre = sca_preactivation(features, model.sca);
  FeatureTensor f_sca = pre;
  for (double& v : f_sca.data()) v = std::max(v, 0.0);
  const CascadeTrace trace =
      cascade_forward(f_sca, model.optou, &gt, GuidanceMode::kOracle);

  LossAndGradient out;
  out.loss = cross_entropy(gt, trace.output);
  const FeatureTensor grad_logits = ce_grad_logits(gt, trace.output);
  const CascadeGradients cg = cascade_backward(trace, model.optou, grad_logits,
                                               GuidanceMode::kOracle);
  const ScaGradients sg = sca_backward(cg.input, features, pre, model.sca);

  out.gradient.reserve(static_cast<std::size_t>(model.param_count()));
  out.gradient.insert(out.gradient.end(), sg.weights.begin(), sg.weights.end());
  out.gradient.insert(out.gradient.end(), sg.bias.begin(), sg.bias.end());
  out.gradient.insert(out.gradient.end(), cg.alphas.begin(), cg.alphas.end());
  out.gradient.insert(out.gradient.end(), cg.etas.begin(), cg.etas.end());
  return out;
}

double loss_eval(const LamModel& model, const FeatureTensor& features,
                 const LabelMap& gt) {
  check_seed(model, features, gt);
  const FeatureTensor f_sca = sca_forward(features, model.sca);
  const FeatureTensor logits =
      cascade_apply(f_sca, model.optou, &gt, GuidanceMode::kOracle);
  return cross_entropy(gt, logits);
}

LamModel init_model(int n_in, int class_count, const TrainConfig& config) {
  config.validate();
  LamModel model;
  model.sca = init_sca_params(n_in, class_count, config.rng_seed,
                              config.sca_init_scale, config.sca_init_bias);
  model.optou = OptouParams::uniform(config.k_layers, config.alpha0, config.eta0);
  model.class_count = class_count;
  model.mode = config.mode;
  return model;
}

TrainResult train_from_seed(const FeatureTensor& seed_features,
                            const LabelMap& seed_gt, int class_count,
                            const TrainConfig& config) {
  config.validate();
  if (class_count < 1) throw InvalidInputError("class count must be >= 1");
  TrainResult result;
  result.model = init_model(seed_features.channels(), class_count, config);
  check_seed(result.model, seed_features, seed_gt);

  std::vector<double> params = result.model.flatten();
  const std::vector<std::uint8_t> mask = result.model.decay_mask();
  AdamState state(params.size());

  LossAndGradient current = loss_and_gradient(result.model, seed_features, seed_gt);
  result.initial_loss = current.loss;
  result.loss_history.reserve(static_cast<std::size_t>(config.epochs));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    adam_step(params, current.gradient, state, config, mask);
    result.model.assign(params);
    current = loss_and_gradient(result.model, seed_features, seed_gt);
    if (!std::isfinite(current.loss)) {
      throw Error("training diverged at epoch " + std::to_string(epoch + 1));
    }
    result.loss_history.push_back(current.loss);
  }
  return result;
}

}  // namespace lam
