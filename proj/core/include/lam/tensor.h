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

#ifndef LAM_TENSOR_H_
#define LAM_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lam {

// Label id marking pixels that take no part in loss, gradient or metrics.
inline constexpr std::uint16_t kIgnoreLabel = 0xFFFF;

// Dense channels x height x width tensor of doubles, channel-major
// (channel, then row, then column).
class FeatureTensor {
 public:
  FeatureTensor() = default;
  // Zero-filled.
  FeatureTensor(int channels, int height, int width);
  FeatureTensor(int channels, int height, int width, std::vector<double> data);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const { return data_[index(c, y, x)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Contiguous plane of one channel.
  std::span<double> channel(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(),
            pixel_count()};
  }
  std::span<const double> channel(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(),
            pixel_count()};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const FeatureTensor& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_;
  }
  bool all_finite() const;

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::size_t index(int c, int y, int x) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

// Per-pixel class ids, row-major, kIgnoreLabel for void pixels.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int height, int width, std::uint16_t fill = 0);
  LabelMap(int height, int width, std::vector<std::uint16_t> ids);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return ids_.size(); }

  std::uint16_t& at(int y, int x) {
    return ids_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint16_t at(int y, int x) const {
    return ids_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::uint16_t& operator[](std::size_t i) { return ids_[i]; }
  std::uint16_t operator[](std::size_t i) const { return ids_[i]; }

  std::span<std::uint16_t> ids() { return ids_; }
  std::span<const std::uint16_t> ids() const { return ids_; }

  std::size_t valid_count() const;
  // Throws InvalidInputError if any non-ignore id is >= class_count.
  void validate(int class_count) const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint16_t> ids_;
};

// Numerically stabilized per-pixel softmax over channels.
FeatureTensor softmax_channels(const FeatureTensor& logits);

// Mean over non-ignore pixels of -log softmax(logits)[target].
double cross_entropy(const LabelMap& target, const FeatureTensor& logits);

// Exact gradient of cross_entropy with respect to the logits:
// (softmax - onehot) / valid_pixel_count, zero at ignore pixels.
FeatureTensor ce_grad_logits(const LabelMap& target,
                             const FeatureTensor& logits);

// Per-pixel argmax over channels; ties go to the lowest channel index.
LabelMap argmax_channels(const FeatureTensor& tensor);

// Channel-expanded one-hot view of a label map; ignore pixels are all zero.
FeatureTensor one_hot(const LabelMap& labels, int class_count);

}  // namespace lam

#endif  // LAM_TENSOR_H_
