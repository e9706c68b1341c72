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

#ifndef LAM_METRICS_H_
#define LAM_METRICS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "lam/tensor.h"

namespace lam {

// Rows are ground-truth classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int class_count);

  int class_count() const { return class_count_; }
  std::int64_t at(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * class_count_ + pred];
  }
  std::int64_t& at(int gt, int pred) {
    return counts_[static_cast<std::size_t>(gt) * class_count_ + pred];
  }
  std::int64_t total() const;

  std::int64_t true_positives(int c) const { return at(c, c); }
  std::int64_t false_positives(int c) const;
  std::int64_t false_negatives(int c) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int class_count_ = 0;
  std::vector<std::int64_t> counts_;
};

// Accumulates one (prediction, ground truth) pair. Ignore pixels in gt are
// skipped; pred may not contain kIgnoreLabel.
ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& gt,
                          int class_count);

// Per-class scores; nullopt for classes with zero union (absent from both
// prediction and ground truth), which the mean leaves out.
struct ClassScores {
  std::vector<std::optional<double>> per_class;
  double mean = 0.0;
};

// IoU_c = TP / (TP + FP + FN). Throws UndefinedMetricError if no class is
// defined.
ClassScores miou(const ConfusionMatrix& m);
// F1_c = 2TP / (2TP + FP + FN).
ClassScores mf1(const ConfusionMatrix& m);

// class_id,iou,f1 rows followed by a mean row.
void write_metrics_csv(std::ostream& out, const ConfusionMatrix& m);

}  // namespace lam

#endif  // LAM_METRICS_H_
