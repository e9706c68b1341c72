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

#include "lam/tensor.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "lam/errors.h"

namespace lam {
namespace {

void check_dims(int channels, int height, int width) {
  if (channels <= 0 || height <= 0 || width <= 0) {
    throw InvalidInputError("tensor dimensions must be positive, got " +
                            std::to_string(channels) + "x" +
                            std::to_string(height) + "x" +
                            std::to_string(width));
  }
}

void check_target(const LabelMap& target, const FeatureTensor& logits) {
  if (target.height() != logits.height() || target.width() != logits.width()) {
    throw ShapeError("label map " + std::to_string(target.height()) + "x" +
                     std::to_string(target.width()) +
                     " does not match logits " +
                     std::to_string(logits.height()) + "x" +
                     std::to_string(logits.width()));
  }
  target.validate(logits.channels());
  if (!logits.all_finite()) {
    throw InvalidInputError("logits contain non-finite values");
  }
}

// Per-pixel max over channels.
std::vector<double> channel_max(const FeatureTensor& t) {
  std::vector<double> m(t.channel(0).begin(), t.channel(0).end());
  for (int c = 1; c < t.channels(); ++c) {
    auto plane = t.channel(c);
    for (std::size_t p = 0; p < m.size(); ++p) m[p] = std::max(m[p], plane[p]);
  }
  return m;
}

}  // namespace

FeatureTensor::FeatureTensor(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(static_cast<std::size_t>(channels) * pixel_count(), 0.0);
}

FeatureTensor::FeatureTensor(int channels, int height, int width,
                             std::vector<double> data)
    : channels_(channels),
      height_(height),
      width_(width),
      data_(std::move(data)) {
  check_dims(channels, height, width);
  const std::size_t expected = static_cast<std::size_t>(channels) * pixel_count();
  if (data_.size() != expected) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " != " + std::to_string(expected));
  }
  if (!all_finite()) {
    throw InvalidInputError("tensor data contains non-finite values");
  }
}

bool FeatureTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

LabelMap::LabelMap(int height, int width, std::uint16_t fill)
    : height_(height), width_(width) {
  check_dims(1, height, width);
  ids_.assign(static_cast<std::size_t>(height) * width, fill);
}

LabelMap::LabelMap(int height, int width, std::vector<std::uint16_t> ids)
    : height_(height), width_(width), ids_(std::move(ids)) {
  check_dims(1, height, width);
  if (ids_.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeError("label data length " + std::to_string(ids_.size()) +
                     " != " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
}

std::size_t LabelMap::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(ids_.begin(), ids_.end(),
                    [](std::uint16_t id) { return id != kIgnoreLabel; }));
}

void LabelMap::validate(int class_count) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] != kIgnoreLabel && ids_[i] >= class_count) {
      throw InvalidInputError("label id " + std::to_string(ids_[i]) +
                              " at pixel " + std::to_string(i) +
                              " is out of range for " +
                              std::to_string(class_count) + " classes");
    }
  }
}

FeatureTensor softmax_channels(const FeatureTensor& logits) {
  if (logits.channels() < 1) {
    throw InvalidInputError("softmax needs at least one channel");
  }
  if (!logits.all_finite()) {
    throw InvalidInputError("softmax input contains non-finite values");
  }
  const std::size_t pixels = logits.pixel_count();
  FeatureTensor out(logits.channels(), logits.height(), logits.width());
  const std::vector<double> m = channel_max(logits);
  std::vector<double> sum(pixels, 0.0);
  for (int c = 0; c < logits.channels(); ++c) {
    auto in = logits.channel(c);
    auto e = out.channel(c);
    for (std::size_t p = 0; p < pixels; ++p) {
      e[p] = std::exp(in[p] - m[p]);
      sum[p] += e[p];
    }
  }
  for (std::size_t p = 0; p < pixels; ++p) sum[p] = 1.0 / sum[p];
  for (int c = 0; c < logits.channels(); ++c) {
    auto e = out.channel(c);
    for (std::size_t p = 0; p < pixels; ++p) e[p] *= sum[p];
  }
  return out;
}

double cross_entropy(const LabelMap& target, const FeatureTensor& logits) {
  check_target(target, logits);
  const std::size_t valid = target.valid_count();
  if (valid == 0) {
    throw DegenerateInputError("cross entropy over zero non-ignore pixels");
  }
  const std::vector<double> m = channel_max(logits);
  const std::size_t pixels = logits.pixel_count();
  std::vector<double> sum(pixels, 0.0);
  for (int c = 0; c < logits.channels(); ++c) {
    auto in = logits.channel(c);
    for (std::size_t p = 0; p < pixels; ++p) sum[p] += std::exp(in[p] - m[p]);
  }
  double total = 0.0;
  for (std::size_t p = 0; p < pixels; ++p) {
    const std::uint16_t id = target[p];
    if (id == kIgnoreLabel) continue;
    // -log softmax = logsumexp - x_target
    total += m[p] + std::log(sum[p]) - logits.channel(id)[p];
  }
  return std::max(0.0, total / static_cast<double>(valid));
}

FeatureTensor ce_grad_logits(const LabelMap& target,
                             const FeatureTensor& logits) {
  check_target(target, logits);
  const std::size_t valid = target.valid_count();
  if (valid == 0) {
    throw DegenerateInputError("cross entropy over zero non-ignore pixels");
  }
  FeatureTensor grad = softmax_channels(logits);
  const double scale = 1.0 / static_cast<double>(valid);
  const std::size_t pixels = logits.pixel_count();
  for (int c = 0; c < grad.channels(); ++c) {
    auto g = grad.channel(c);
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::uint16_t id = target[p];
      if (id == kIgnoreLabel) {
        g[p] = 0.0;
      } else {
        g[p] = (g[p] - (id == c ? 1.0 : 0.0)) * scale;
      }
    }
  }
  return grad;
}

LabelMap argmax_channels(const FeatureTensor& tensor) {
  LabelMap out(tensor.height(), tensor.width());
  std::vector<double> best(tensor.channel(0).begin(), tensor.channel(0).end());
  for (int c = 1; c < tensor.channels(); ++c) {
    auto plane = tensor.channel(c);
    for (std::size_t p = 0; p < best.size(); ++p) {
      if (plane[p] > best[p]) {
        best[p] = plane[p];
        out[p] = static_cast<std::uint16_t>(c);
      }
    }
  }
  return out;
}

FeatureTensor one_hot(const LabelMap& labels, int class_count) {
  labels.validate(class_count);
  FeatureTensor out(class_count, labels.height(), labels.width());
  for (std::size_t p = 0; p < labels.pixel_count(); ++p) {
    if (labels[p] != kIgnoreLabel) out.channel(labels[p])[p] = 1.0;
  }
  return out;
}

}  // namespace lam
