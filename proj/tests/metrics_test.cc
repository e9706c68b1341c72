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

#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lam/errors.h"
#include "oracles.h"

namespace lam {
namespace {

// gt (0 0 0 0 1 1 1 1), pred (0 0 1 1 1 1 1 1): confusion [[2, 2], [0, 4]].
LabelMap worked_gt() { return LabelMap(2, 4, {0, 0, 0, 0, 1, 1, 1, 1}); }
LabelMap worked_pred() { return LabelMap(2, 4, {0, 0, 1, 1, 1, 1, 1, 1}); }

TEST(ConfusionTest, WorkedExampleCounts) {
  const ConfusionMatrix m = confusion(worked_pred(), worked_gt(), 2);
  EXPECT_EQ(m.at(0, 0), 2);
  EXPECT_EQ(m.at(0, 1), 2);
  EXPECT_EQ(m.at(1, 0), 0);
  EXPECT_EQ(m.at(1, 1), 4);
  EXPECT_EQ(m.total(), 8);
  EXPECT_EQ(m.false_positives(1), 2);
  EXPECT_EQ(m.false_negatives(0), 2);
}

TEST(ConfusionTest, IgnoreGroundTruthIsSkipped) {
  LabelMap gt = worked_gt();
  gt[2] = kIgnoreLabel;
  EXPECT_EQ(confusion(worked_pred(), gt, 2).total(), 7);
}

TEST(ConfusionTest, ErrorPaths) {
  LabelMap pred = worked_pred();
  pred[0] = kIgnoreLabel;
  EXPECT_THROW(confusion(pred, worked_gt(), 2), InvalidInputError);
  EXPECT_THROW(confusion(LabelMap(1, 8), worked_gt(), 2), ShapeError);
  EXPECT_THROW(confusion(worked_pred(), worked_gt(), 1), InvalidInputError);
}

TEST(ConfusionTest, Accumulates) {
  ConfusionMatrix m = confusion(worked_pred(), worked_gt(), 2);
  m += confusion(worked_pred(), worked_gt(), 2);
  EXPECT_EQ(m.at(1, 1), 8);
  EXPECT_EQ(m.total(), 16);
}

TEST(ScoresTest, WorkedExample) {
  const ConfusionMatrix m = confusion(worked_pred(), worked_gt(), 2);
  const ClassScores iou = miou(m);
  const ClassScores f1 = mf1(m);
  EXPECT_DOUBLE_EQ(*iou.per_class[0], 0.5);
  EXPECT_DOUBLE_EQ(*iou.per_class[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou.mean, 7.0 / 12.0);
  EXPECT_DOUBLE_EQ(*f1.per_class[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*f1.per_class[1], 0.8);
  EXPECT_DOUBLE_EQ(f1.mean, 11.0 / 15.0);
}

TEST(ScoresTest, PerfectPrediction) {
  const ConfusionMatrix m = confusion(worked_gt(), worked_gt(), 2);
  EXPECT_EQ(miou(m).mean, 1.0);
  EXPECT_EQ(mf1(m).mean, 1.0);
}

TEST(ScoresTest, AbsentClassIsLeftOutOfMean) {
  const ConfusionMatrix m = confusion(worked_pred(), worked_gt(), 3);
  const ClassScores iou = miou(m);
  EXPECT_FALSE(iou.per_class[2].has_value());
  EXPECT_DOUBLE_EQ(iou.mean, 7.0 / 12.0);
}

TEST(ScoresTest, AllIgnoreGroundTruthIsUndefined) {
  const ConfusionMatrix m = confusion(worked_pred(), LabelMap(2, 4, kIgnoreLabel), 2);
  EXPECT_EQ(m.total(), 0);
  EXPECT_THROW(miou(m), UndefinedMetricError);
  EXPECT_THROW(mf1(m), UndefinedMetricError);
}

TEST(ScoresTest, MatchesSetOracleAndF1Identity) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int classes = 2 + trial % 5;
    const LabelMap gt = testing::random_labels(rng, 6, 7, classes, 0.1);
    const LabelMap pred = testing::random_labels(rng, 6, 7, classes);
    const ConfusionMatrix m = confusion(pred, gt, classes);
    const ClassScores iou = miou(m);
    const ClassScores f1 = mf1(m);
    double iou_sum = 0.0, f1_sum = 0.0;
    int defined = 0;
    for (int c = 0; c < classes; ++c) {
      const testing::SetScores s = testing::set_scores(pred, gt, c);
      ASSERT_EQ(iou.per_class[c].has_value(), s.defined);
      if (!s.defined) continue;
      EXPECT_NEAR(*iou.per_class[c], s.iou, 1e-12);
      EXPECT_NEAR(*f1.per_class[c], s.f1, 1e-12);
      const double j = *iou.per_class[c];
      EXPECT_NEAR(*f1.per_class[c], 2.0 * j / (1.0 + j), 1e-12);
      iou_sum += s.iou;
      f1_sum += s.f1;
      ++defined;
    }
    EXPECT_NEAR(iou.mean, iou_sum / defined, 1e-12);
    EXPECT_NEAR(f1.mean, f1_sum / defined, 1e-12);
  }
}

TEST(ScoresTest, InvariantUnderPixelPermutation) {
  std::mt19937_64 rng(22);
  const LabelMap gt = testing::random_labels(rng, 5, 5, 4, 0.1);
  const LabelMap pred = testing::random_labels(rng, 5, 5, 4);
  std::vector<std::size_t> order(25);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  LabelMap gt2(5, 5), pred2(5, 5);
  for (std::size_t i = 0; i < 25; ++i) {
    gt2[i] = gt[order[i]];
    pred2[i] = pred[order[i]];
  }
  EXPECT_EQ(confusion(pred, gt, 4), confusion(pred2, gt2, 4));
}

TEST(MetricsCsvTest, WorkedExample) {
  std::ostringstream out;
  write_metrics_csv(out, confusion(worked_pred(), worked_gt(), 3));
  EXPECT_EQ(out.str(),
            "class_id,iou,f1\n"
            "0,0.500000,0.666667\n"
            "1,0.666667,0.800000\n"
            "2,nan,nan\n"
            "mean,0.583333,0.733333\n");
}

}  // namespace
}  // namespace lam
