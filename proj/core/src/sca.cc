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

#include "lam/sca.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lam/errors.h"

namespace lam {
namespace {

// Pixels per tile in the forward product. Each input row of the tile is read
// once against a C x kTile accumulator block that stays in L1.
constexpr std::size_t kTile = 64;

void check_features(const FeatureTensor& features, const ScaParams& params) {
  if (features.channels() != params.n_in) {
    throw ShapeError("adapter expects " + std::to_string(params.n_in) +
                     " input channels, got " +
                     std::to_string(features.channels()));
  }
}

}  // namespace

ScaParams ScaParams::zeros(int n_in, int n_out) {
  if (n_in < 1 || n_out < 1) {
    throw InvalidInputError("adapter channel counts must be positive");
  }
  ScaParams p;
  p.n_in = n_in;
  p.n_out = n_out;
  p.weights.assign(static_cast<std::size_t>(n_in) * n_out, 0.0);
  p.bias.assign(static_cast<std::size_t>(n_out), 0.0);
  return p;
}

std::int64_t ScaParams::param_count() const {
  return sca_param_count(n_in, n_out);
}

void ScaParams::validate() const {
  if (n_in < 1 || n_out < 1) {
    throw InvalidInputError("adapter channel counts must be positive");
  }
  if (weights.size() != static_cast<std::size_t>(n_in) * n_out ||
      bias.size() != static_cast<std::size_t>(n_out)) {
    throw ShapeError("adapter parameter lengths do not match " +
                     std::to_string(n_out) + "x" + std::to_string(n_in));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(weights.begin(), weights.end(), finite) ||
      !std::all_of(bias.begin(), bias.end(), finite)) {
    throw InvalidInputError("adapter parameters contain non-finite values");
  }
}

std::int64_t sca_param_count(std::int64_t n_in, std::int64_t n_out) {
  if (n_in < 1 || n_out < 1) {
    throw InvalidInputError("sca_param_count needs positive channel counts");
  }
  return (n_in + 1) * n_out;
}

ScaParams init_sca_params(int n_in, int n_out, std::uint64_t rng_seed,
                          double scale, double bias_init) {
  ScaParams p = ScaParams::zeros(n_in, n_out);
  std::mt19937_64 rng(rng_seed);
  const double bound = scale / std::sqrt(static_cast<double>(n_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : p.weights) w = dist(rng);
  std::fill(p.bias.begin(), p.bias.end(), bias_init);
  return p;
}

FeatureTensor sca_preactivation(const FeatureTensor& features,
                                const ScaParams& params) {
  check_features(features, params);
  const std::size_t pixels = features.pixel_count();
  const std::size_t n_out = static_cast<std::size_t>(params.n_out);
  FeatureTensor out(params.n_out, features.height(), features.width());
  std::vector<double> acc(n_out * kTile);
  for (std::size_t start = 0; start < pixels; start += kTile) {
    const std::size_t len = std::min(kTile, pixels - start);
    for (std::size_t c = 0; c < n_out; ++c) {
      std::fill_n(acc.data() + c * kTile, len, params.bias[c]);
    }
    for (int n = 0; n < params.n_in; ++n) {
      const double* in = features.channel(n).data() + start;
      for (std::size_t c = 0; c < n_out; ++c) {
        const double wn = params.weights[c * params.n_in + n];
        double* a = acc.data() + c * kTile;
        for (std::size_t p = 0; p < len; ++p) a[p] += wn * in[p];
      }
    }
    for (std::size_t c = 0; c < n_out; ++c) {
      std::copy_n(acc.data() + c * kTile, len, out.channel(static_cast<int>(c)).data() + start);
    }
  }
  return out;
}

FeatureTensor sca_forward(const FeatureTensor& features,
                          const ScaParams& params) {
  FeatureTensor out = sca_preactivation(features, params);
  for (double& v : out.data()) v = std::max(v, 0.0);
  return out;
}

ScaGradients sca_backward(const FeatureTensor& grad_out,
                          const FeatureTensor& cached_input,
                          const FeatureTensor& cached_preactivation,
                          const ScaParams& params) {
  check_features(cached_input, params);
  if (grad_out.channels() != params.n_out ||
      !grad_out.same_shape(cached_preactivation) ||
      grad_out.height() != cached_input.height() ||
      grad_out.width() != cached_input.width()) {
    throw ShapeError("sca_backward: gradient, input and cache shapes disagree");
  }
  const std::size_t pixels = cached_input.pixel_count();

  FeatureTensor gated = grad_out;
  for (std::size_t i = 0; i < gated.size(); ++i) {
    if (!(cached_preactivation[i] > 0.0)) gated[i] = 0.0;
  }

  ScaGradients g;
  g.weights.assign(params.weights.size(), 0.0);
  g.bias.assign(params.bias.size(), 0.0);
  g.input = FeatureTensor(params.n_in, cached_input.height(),
                          cached_input.width());
  for (int c = 0; c < params.n_out; ++c) {
    auto gc = gated.channel(c);
    double bias_sum = 0.0;
    for (std::size_t p = 0; p < pixels; ++p) bias_sum += gc[p];
    g.bias[c] = bias_sum;
    for (int n = 0; n < params.n_in; ++n) {
      auto in = cached_input.channel(n);
      double dot = 0.0;
      for (std::size_t p = 0; p < pixels; ++p) dot += gc[p] * in[p];
      g.weights[static_cast<std::size_t>(c) * params.n_in + n] = dot;

      const double w = params.weight(c, n);
      auto gin = g.input.channel(n);
      for (std::size_t p = 0; p < pixels; ++p) gin[p] += w * gc[p];
    }
  }
  return g;
}

}  // namespace lam
