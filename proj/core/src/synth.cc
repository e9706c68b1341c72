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

#include "lam/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lam/errors.h"

namespace lam {
namespace {

constexpr int kMinRegion = 2;

struct Rect {
  int y0, x0, h, w;
  bool splittable() const { return h >= 2 * kMinRegion || w >= 2 * kMinRegion; }
  long area() const { return static_cast<long>(h) * w; }
};

}  // namespace

std::vector<double> class_prototype(int class_id, int n_channels) {
  if (class_id < 0 || class_id >= n_channels) {
    throw InvalidInputError("prototype for class " + std::to_string(class_id) +
                            " needs more than " + std::to_string(n_channels) +
                            " channels");
  }
  std::vector<double> v(static_cast<std::size_t>(n_channels), 0.0);
  v[static_cast<std::size_t>(class_id)] = kPrototypeMargin;
  return v;
}

Scene generate_scene(std::uint64_t rng_seed, int class_count, int n_channels,
                     int height, int width, double noise_sigma) {
  if (class_count < 2) throw InvalidInputError("synth needs at least 2 classes");
  if (n_channels < class_count) {
    throw InvalidInputError("synth needs n_channels >= class_count (" +
                            std::to_string(n_channels) + " < " +
                            std::to_string(class_count) + ")");
  }
  if (height < kMinRegion || width < kMinRegion) {
    throw InvalidInputError("synth image must be at least 2x2");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidInputError("noise sigma must be finite and >= 0");
  }

  std::mt19937_64 rng(rng_seed);

  // Repeatedly split the largest splittable rectangle at a random cut.
  std::vector<Rect> regions{{0, 0, height, width}};
  const std::size_t target = 2 * static_cast<std::size_t>(class_count);
  while (regions.size() < target) {
    auto it = std::max_element(regions.begin(), regions.end(),
                               [](const Rect& a, const Rect& b) {
                                 const long ka = a.splittable() ? a.area() : -1;
                                 const long kb = b.splittable() ? b.area() : -1;
                                 return ka < kb;
                               });
    if (!it->splittable()) break;
    Rect r = *it;
    bool horizontal;  // cut across rows
    if (r.h >= 2 * kMinRegion && r.w >= 2 * kMinRegion) {
      horizontal = std::bernoulli_distribution(0.5)(rng);
    } else {
      horizontal = r.h >= 2 * kMinRegion;
    }
    const int extent = horizontal ? r.h : r.w;
    const int cut =
        std::uniform_int_distribution<int>(kMinRegion, extent - kMinRegion)(rng);
    Rect a = r, b = r;
    if (horizontal) {
      a.h = cut;
      b.y0 = r.y0 + cut;
      b.h = r.h - cut;
    } else {
      a.w = cut;
      b.x0 = r.x0 + cut;
      b.w = r.w - cut;
    }
    *it = a;
    regions.push_back(b);
  }

  // Every class once (as far as regions allow), the rest uniformly random.
  std::vector<std::uint16_t> classes;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    classes.push_back(i < static_cast<std::size_t>(class_count)
                          ? static_cast<std::uint16_t>(i)
                          : static_cast<std::uint16_t>(
                                std::uniform_int_distribution<int>(
                                    0, class_count - 1)(rng)));
  }
  std::shuffle(classes.begin(), classes.end(), rng);

  Scene scene{FeatureTensor(n_channels, height, width), LabelMap(height, width)};
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Rect& r = regions[i];
    for (int y = r.y0; y < r.y0 + r.h; ++y) {
      for (int x = r.x0; x < r.x0 + r.w; ++x) scene.labels.at(y, x) = classes[i];
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  for (int c = 0; c < n_channels; ++c) {
    auto plane = scene.features.channel(c);
    for (std::size_t p = 0; p < plane.size(); ++p) {
      const double base = scene.labels[p] == c ? kPrototypeMargin : 0.0;
      plane[p] = noise_sigma > 0.0 ? base + noise_sigma * noise(rng) : base;
    }
  }
  return scene;
}

}  // namespace lam
