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

#include "lam/metrics.h"

#include <cstdio>
#include <string>

#include "lam/errors.h"

namespace lam {
namespace {

template <typename Score>
ClassScores score_classes(const ConfusionMatrix& m, Score score) {
  ClassScores out;
  out.per_class.resize(static_cast<std::size_t>(m.class_count()));
  double sum = 0.0;
  int defined = 0;
  for (int c = 0; c < m.class_count(); ++c) {
    const std::int64_t tp = m.true_positives(c);
    const std::int64_t fp = m.false_positives(c);
    const std::int64_t fn = m.false_negatives(c);
    if (tp + fp + fn == 0) continue;
    const double s = score(tp, fp, fn);
    out.per_class[c] = s;
    sum += s;
    ++defined;
  }
  if (defined == 0) {
    throw UndefinedMetricError("no class has a non-empty union");
  }
  out.mean = sum / defined;
  return out;
}

std::string format_score(const std::optional<double>& v) {
  if (!v) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(int class_count) : class_count_(class_count) {
  if (class_count < 1) throw InvalidInputError("class count must be >= 1");
  counts_.assign(static_cast<std::size_t>(class_count) * class_count, 0);
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (std::int64_t v : counts_) t += v;
  return t;
}

std::int64_t ConfusionMatrix::false_positives(int c) const {
  std::int64_t s = 0;
  for (int g = 0; g < class_count_; ++g) {
    if (g != c) s += at(g, c);
  }
  return s;
}

std::int64_t ConfusionMatrix::false_negatives(int c) const {
  std::int64_t s = 0;
  for (int p = 0; p < class_count_; ++p) {
    if (p != c) s += at(c, p);
  }
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.class_count_ != class_count_) {
    throw ShapeError("cannot merge confusion matrices of different sizes");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& gt,
                          int class_count) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw ShapeError("prediction and ground truth sizes differ");
  }
  ConfusionMatrix m(class_count);
  for (std::size_t i = 0; i < pred.pixel_count(); ++i) {
    const std::uint16_t p = pred[i];
    const std::uint16_t g = gt[i];
    if (p == kIgnoreLabel) {
      throw InvalidInputError("prediction contains the ignore label at pixel " +
                              std::to_string(i));
    }
    if (p >= class_count) {
      throw InvalidInputError("predicted id " + std::to_string(p) +
                              " out of range");
    }
    if (g == kIgnoreLabel) continue;
    if (g >= class_count) {
      throw InvalidInputError("ground-truth id " + std::to_string(g) +
                              " out of range");
    }
    ++m.at(g, p);
  }
  return m;
}

ClassScores miou(const ConfusionMatrix& m) {
  return score_classes(m, [](std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    return static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
  });
}

ClassScores mf1(const ConfusionMatrix& m) {
  return score_classes(m, [](std::int64_t tp, std::int64_t fp, std::int64_t fn) {
    return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
  });
}

void write_metrics_csv(std::ostream& out, const ConfusionMatrix& m) {
  const ClassScores iou = miou(m);
  const ClassScores f1 = mf1(m);
  out << "class_id,iou,f1\n";
  for (int c = 0; c < m.class_count(); ++c) {
    out << c << ',' << format_score(iou.per_class[c]) << ','
        << format_score(f1.per_class[c]) << '\n';
  }
  out << "mean," << format_score(iou.mean) << ',' << format_score(f1.mean)
      << '\n';
}

}  // namespace lam
