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

#include "lam/optou.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lam/errors.h"
#include "oracles.h"

namespace lam {
namespace {

using testing::random_labels;
using testing::random_tensor;

constexpr GuidanceMode kAllModes[] = {GuidanceMode::kOracle, GuidanceMode::kSelf,
                                      GuidanceMode::kScaleOnly};

OptouParams random_params(std::mt19937_64& rng, int k, double alpha_lo = 0.5,
                          double alpha_hi = 1.5, double eta_hi = 0.5) {
  std::uniform_real_distribution<double> a(alpha_lo, alpha_hi), e(0.0, eta_hi);
  OptouParams p;
  for (int i = 0; i < k; ++i) {
    p.alphas.push_back(a(rng));
    p.etas.push_back(e(rng));
  }
  return p;
}

double max_rel_diff(const FeatureTensor& a, const FeatureTensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return worst;
}

TEST(GuidanceModeTest, RoundTripsNames) {
  for (GuidanceMode m : kAllModes) EXPECT_EQ(parse_guidance_mode(to_string(m)), m);
  EXPECT_THROW(parse_guidance_mode("auto"), InvalidInputError);
}

TEST(OptouParamsTest, CountAndValidation) {
  EXPECT_EQ(OptouParams::uniform(10, 1.0, 0.1).param_count(), 20);
  EXPECT_THROW(OptouParams::uniform(0, 1.0, 0.1), InvalidInputError);
  OptouParams bad{{1.0, 1.0}, {0.1}};
  EXPECT_THROW(bad.validate(), ShapeError);
}

TEST(LayerForwardTest, ScaleOnlyScales) {
  const FeatureTensor out = layer_forward(FeatureTensor(2, 1, 1, {1.0, -1.0}), 2.0, 0.7,
                                          nullptr, GuidanceMode::kScaleOnly);
  EXPECT_EQ(out[0], 2.0);
  EXPECT_EQ(out[1], -2.0);
}

TEST(LayerForwardTest, OracleAtSaturatedTargetIsStationary) {
  const FeatureTensor prev(3, 1, 1, {0.0, 40.0, 0.0});
  const LabelMap g(1, 1, 1);
  const FeatureTensor out = layer_forward(prev, 1.0, 0.5, &g, GuidanceMode::kOracle);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(out[i], prev[i], 1e-16);
}

TEST(LayerForwardTest, OracleHandEvaluatedStep) {
  const double ln3 = std::log(3.0);
  const LabelMap g(1, 1, 0);
  const FeatureTensor out = layer_forward(FeatureTensor(2, 1, 1, {0.0, ln3}), 1.0, 0.5,
                                          &g, GuidanceMode::kOracle);
  EXPECT_NEAR(out[0], 0.375, 1e-15);
  EXPECT_NEAR(out[1], ln3 - 0.375, 1e-15);
}

TEST(LayerForwardTest, SelfUsesArgmaxOfScaledInput) {
  const double ln3 = std::log(3.0);
  const FeatureTensor out = layer_forward(FeatureTensor(2, 1, 1, {0.0, ln3}), 1.0, 0.5,
                                          nullptr, GuidanceMode::kSelf);
  // pseudo-label 1: (0, ln3) - 0.5 * ((0.25, 0.75) - (0, 1))
  EXPECT_NEAR(out[0], -0.125, 1e-15);
  EXPECT_NEAR(out[1], ln3 + 0.125, 1e-15);
}

TEST(LayerForwardTest, IgnorePixelsOnlyScale) {
  const LabelMap g(1, 1, kIgnoreLabel);
  const FeatureTensor out = layer_forward(FeatureTensor(2, 1, 1, {0.5, 1.0}), 2.0, 0.5,
                                          &g, GuidanceMode::kOracle);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 2.0);
}

TEST(LayerForwardTest, OracleWithoutGuidanceFails) {
  EXPECT_THROW(layer_forward(FeatureTensor(2, 1, 1), 1.0, 0.1, nullptr,
                             GuidanceMode::kOracle),
               InvalidInputError);
}

TEST(CascadeForwardTest, IdentityCascadeIsBitwiseIdentity) {
  std::mt19937_64 rng(1);
  const FeatureTensor f = random_tensor(rng, 4, 3, 5, -3.0, 3.0);
  const LabelMap g = random_labels(rng, 3, 5, 4);
  const OptouParams p = OptouParams::uniform(6, 1.0, 0.0);
  for (GuidanceMode m : kAllModes) {
    const CascadeTrace t = cascade_forward(f, p, &g, m);
    EXPECT_EQ(t.output, f) << to_string(m);
    EXPECT_EQ(t.layers.size(), 6u);
  }
}

TEST(CascadeForwardTest, ScaleOnlyIsProductOfAlphas) {
  std::mt19937_64 rng(2);
  const FeatureTensor f = random_tensor(rng, 3, 2, 2);
  const OptouParams p{{2.0, 3.0, 0.5}, {0.3, 0.3, 0.3}};
  const CascadeTrace t = cascade_forward(f, p, nullptr, GuidanceMode::kScaleOnly);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(t.output[i], 3.0 * f[i], 1e-15);
  const FeatureTensor closed = closed_form_output(f, p, t);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(closed[i], 3.0 * f[i], 1e-15);
}

TEST(CascadeForwardTest, TraceShapes) {
  std::mt19937_64 rng(3);
  const FeatureTensor f = random_tensor(rng, 3, 2, 4);
  const LabelMap g = random_labels(rng, 2, 4, 3);
  const CascadeTrace t =
      cascade_forward(f, random_params(rng, 4), &g, GuidanceMode::kOracle);
  ASSERT_EQ(t.layers.size(), 4u);
  for (const auto& layer : t.layers) {
    EXPECT_TRUE(layer.input.same_shape(f));
    EXPECT_TRUE(layer.scaled.same_shape(f));
    EXPECT_TRUE(layer.probabilities.same_shape(f));
    EXPECT_EQ(layer.guidance, g);
  }
  EXPECT_EQ(t.layers[0].input, f);
}

TEST(CascadeForwardTest, ApplyMatchesTracedForward) {
  std::mt19937_64 rng(4);
  // The second shape spans several pixel blocks with a partial tail.
  for (auto [h, w] : {std::pair{3, 3}, std::pair{23, 31}}) {
    const FeatureTensor f = random_tensor(rng, 5, h, w, -2.0, 2.0);
    const LabelMap g = random_labels(rng, h, w, 5, 0.2);
    const OptouParams p = random_params(rng, 7);
    for (GuidanceMode m : kAllModes) {
      EXPECT_EQ(cascade_apply(f, p, &g, m), cascade_forward(f, p, &g, m).output);
    }
  }
}

TEST(ClosedFormTest, SingleLayerTelescope) {
  std::mt19937_64 rng(5);
  const FeatureTensor f = random_tensor(rng, 3, 2, 2);
  const LabelMap g = random_labels(rng, 2, 2, 3);
  const OptouParams p{{1.7}, {0.4}};
  const CascadeTrace t = cascade_forward(f, p, &g, GuidanceMode::kOracle);
  FeatureTensor scaled = f;
  for (double& v : scaled.data()) v *= 1.7;
  const FeatureTensor prob = testing::naive_softmax(scaled);
  const FeatureTensor closed = closed_form_output(f, p, t);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < 4; ++i) {
      const double want =
          1.7 * f.channel(c)[i] - 0.4 * (prob.channel(c)[i] - (g[i] == c ? 1.0 : 0.0));
      EXPECT_NEAR(closed.channel(c)[i], want, 1e-14);
    }
  }
}

TEST(ClosedFormTest, GradientFreeReduction) {
  std::mt19937_64 rng(6);
  const FeatureTensor f = random_tensor(rng, 3, 2, 2);
  const LabelMap g = random_labels(rng, 2, 2, 3);
  OptouParams p = random_params(rng, 4);
  std::fill(p.etas.begin(), p.etas.end(), 0.0);
  const CascadeTrace t = cascade_forward(f, p, &g, GuidanceMode::kOracle);
  double prod = 1.0;
  for (double a : p.alphas) prod *= a;
  const FeatureTensor closed = closed_form_output(f, p, t);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(closed[i], prod * f[i]);
}

TEST(ClosedFormTest, MatchesIterativeForwardAllModes) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> k_dist(1, 8), c_dist(2, 6), s_dist(1, 5);
  for (int trial = 0; trial < 120; ++trial) {
    const GuidanceMode m = kAllModes[trial % 3];
    const int c = c_dist(rng), h = s_dist(rng), w = s_dist(rng);
    const FeatureTensor f = random_tensor(rng, c, h, w, 0.0, 3.0);
    const LabelMap g = random_labels(rng, h, w, c, 0.1);
    const OptouParams p = random_params(rng, k_dist(rng), -1.5, 1.5);
    const CascadeTrace t = cascade_forward(f, p, &g, m);
    EXPECT_LE(max_rel_diff(closed_form_output(f, p, t), t.output), 1e-9);
  }
}

TEST(ClosedFormTest, TraceDepthMismatch) {
  const FeatureTensor f(2, 1, 1);
  const CascadeTrace t =
      cascade_forward(f, OptouParams::uniform(2, 1.0, 0.1), nullptr, GuidanceMode::kSelf);
  EXPECT_THROW(closed_form_output(f, OptouParams::uniform(3, 1.0, 0.1), t), ShapeError);
}

TEST(CascadeBackwardTest, ZeroCotangent) {
  std::mt19937_64 rng(8);
  const FeatureTensor f = random_tensor(rng, 3, 2, 2);
  const LabelMap g = random_labels(rng, 2, 2, 3);
  const OptouParams p = random_params(rng, 3);
  const CascadeTrace t = cascade_forward(f, p, &g, GuidanceMode::kOracle);
  const CascadeGradients grads =
      cascade_backward(t, p, FeatureTensor(3, 2, 2), GuidanceMode::kOracle);
  for (double v : grads.alphas) EXPECT_EQ(v, 0.0);
  for (double v : grads.etas) EXPECT_EQ(v, 0.0);
  for (double v : grads.input.data()) EXPECT_EQ(v, 0.0);
}

TEST(CascadeBackwardTest, ScaleOnlyAlphaGradientIsProductOfOthers) {
  std::mt19937_64 rng(9);
  const FeatureTensor f = random_tensor(rng, 3, 2, 3);
  const FeatureTensor r = random_tensor(rng, 3, 2, 3);
  OptouParams p = random_params(rng, 4);
  std::fill(p.etas.begin(), p.etas.end(), 0.0);
  const CascadeTrace t = cascade_forward(f, p, nullptr, GuidanceMode::kScaleOnly);
  const CascadeGradients grads = cascade_backward(t, p, r, GuidanceMode::kScaleOnly);
  double rf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) rf += r[i] * f[i];
  for (int j = 0; j < 4; ++j) {
    double others = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k != j) others *= p.alphas[k];
    }
    EXPECT_NEAR(grads.alphas[j], others * rf, 1e-12);
    EXPECT_EQ(grads.etas[j], 0.0);
  }
}

TEST(CascadeBackwardTest, ModeMismatchIsRejected) {
  const FeatureTensor f(2, 1, 1);
  const OptouParams p = OptouParams::uniform(2, 1.0, 0.1);
  const CascadeTrace t = cascade_forward(f, p, nullptr, GuidanceMode::kSelf);
  EXPECT_THROW(cascade_backward(t, p, FeatureTensor(2, 1, 1), GuidanceMode::kOracle),
               InvalidInputError);
}

TEST(CascadeBackwardTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> c_dist(2, 6), s_dist(1, 4);
  for (int trial = 0; trial < 45; ++trial) {
    const GuidanceMode m = kAllModes[trial % 3];
    const int k = 1 + (trial / 3) % 5;
    const int c = c_dist(rng), h = s_dist(rng), w = s_dist(rng);
    OptouParams p = random_params(rng, k);
    FeatureTensor f = random_tensor(rng, c, h, w, -2.0, 2.0);
    const LabelMap g = random_labels(rng, h, w, c, 0.1);
    const FeatureTensor r = random_tensor(rng, c, h, w);
    auto objective = [&] {
      const FeatureTensor out = cascade_apply(f, p, &g, m);
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += r[i] * out[i];
      return s;
    };
    const CascadeGradients grads = cascade_backward(cascade_forward(f, p, &g, m), p, r, m);
    for (int l = 0; l < k; ++l) {
      EXPECT_LE(testing::rel_error(grads.alphas[l],
                                   testing::central_difference(objective, p.alphas[l])),
                1e-4);
      EXPECT_LE(testing::rel_error(grads.etas[l],
                                   testing::central_difference(objective, p.etas[l])),
                1e-4);
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_LE(testing::rel_error(grads.input[i],
                                   testing::central_difference(objective, f[i])),
                1e-4);
    }
  }
}

TEST(CascadePropertyTest, ScaleOnlyPreservesArgmaxForPositiveAlphas) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureTensor f = random_tensor(rng, 5, 4, 4, 0.0, 2.0);
    const OptouParams p = random_params(rng, 10, 0.05, 3.0);
    const FeatureTensor out = cascade_apply(f, p, nullptr, GuidanceMode::kScaleOnly);
    EXPECT_EQ(argmax_channels(out), argmax_channels(f));
  }
}

TEST(CascadePropertyTest, UnitAlphaOracleDescentIsMonotone) {
  std::mt19937_64 rng(12);
  for (double eta : {0.1, 0.25, 0.5}) {
    for (int trial = 0; trial < 30; ++trial) {
      const FeatureTensor f = random_tensor(rng, 4, 3, 3, -3.0, 3.0);
      LabelMap g = random_labels(rng, 3, 3, 4, 0.1);
      if (g.valid_count() == 0) g[0] = 0;
      const CascadeTrace t = cascade_forward(f, OptouParams::uniform(10, 1.0, eta), &g,
                                             GuidanceMode::kOracle);
      double prev = cross_entropy(g, f);
      for (std::size_t k = 1; k <= t.layers.size(); ++k) {
        const FeatureTensor& o = k < t.layers.size() ? t.layers[k].input : t.output;
        const double ce = cross_entropy(g, o);
        EXPECT_LE(ce, prev) << "eta " << eta << " layer " << k;
        prev = ce;
      }
    }
  }
}

}  // namespace
}  // namespace lam
