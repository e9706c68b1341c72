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

#ifndef LAM_SYNTH_H_
#define LAM_SYNTH_H_

#include <cstdint>
#include <vector>

#include "lam/tensor.h"

namespace lam {

// Distance between class prototypes is margin * sqrt(2).
inline constexpr double kPrototypeMargin = 1.0;

struct Scene {
  FeatureTensor features;
  LabelMap labels;
};

// Prototype of class c in an n_channels-dim feature space: margin * e_c.
std::vector<double> class_prototype(int class_id, int n_channels);

// Deterministic synthetic scene. The image is cut by random axis-aligned
// splits into rectangles of at least 2x2 pixels (up to 2 * class_count of
// them), every class is placed at least once when there are enough
// rectangles, and each pixel carries its class prototype plus N(0, sigma^2)
// noise.
Scene generate_scene(std::uint64_t rng_seed, int class_count, int n_channels,
                     int height, int width, double noise_sigma);

}  // namespace lam

#endif  // LAM_SYNTH_H_
