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

#include "lam/annotator.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lam/errors.h"
#include "lam/metrics.h"
#include "lam/synth.h"
#include "lam/trainer.h"
#include "oracles.h"

namespace lam {
namespace {

namespace fs = std::filesystem;

LamModel identity_model(int classes, int k, GuidanceMode mode) {
  LamModel m;
  m.class_count = classes;
  m.sca = ScaParams::zeros(classes, classes);
  for (int c = 0; c < classes; ++c) m.sca.weight(c, c) = 1.0;
  m.optou = OptouParams::uniform(k, 1.0, 0.1);
  m.mode = mode;
  return m;
}

double accuracy(const LabelMap& a, const LabelMap& b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.pixel_count(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.pixel_count());
}

const LamModel& trained_model() {
  static const LamModel model = [] {
    const Scene seed = generate_scene(100, 4, 8, 24, 24, 0.1);
    TrainConfig c;
    c.learning_rate = 1e-2;
    return train_from_seed(seed.features, seed.labels, 4, c).model;
  }();
  return model;
}

TEST(AnnotateTest, DominantChannelWins) {
  const FeatureTensor f(3, 1, 2, {0.1, 0.0, 2.0, 0.0, 0.3, 1.0});
  for (GuidanceMode m : {GuidanceMode::kSelf, GuidanceMode::kScaleOnly}) {
    const LabelMap out = annotate(f, identity_model(3, 5, m));
    EXPECT_EQ(out[0], 1);
    EXPECT_EQ(out[1], 2);
  }
}

TEST(AnnotateTest, ScaleOnlyEqualsArgmaxOfAdapterOutput) {
  std::mt19937_64 rng(1);
  const LamModel m = trained_model();
  const FeatureTensor f = testing::random_tensor(rng, 8, 6, 6, 0.0, 1.0);
  EXPECT_EQ(annotate(f, m, GuidanceMode::kScaleOnly),
            argmax_channels(sca_forward(f, m.sca)));
}

TEST(AnnotateTest, OracleModeRecoversHeldOutLabels) {
  const Scene s = generate_scene(7, 4, 8, 32, 32, 0.1);
  const LabelMap out = annotate(s.features, trained_model(), GuidanceMode::kOracle, &s.labels);
  EXPECT_GE(accuracy(out, s.labels), 0.999);
}

TEST(AnnotateTest, OutputIsPureLabelMap) {
  const Scene s = generate_scene(8, 4, 8, 16, 20, 0.3);
  const LabelMap out = annotate(s.features, trained_model());
  EXPECT_EQ(out.height(), 16);
  EXPECT_EQ(out.width(), 20);
  for (std::uint16_t id : out.ids()) EXPECT_LT(id, 4);
}

TEST(AnnotateTest, SelfAtLeastAsGoodAsScaleOnly) {
  double self_sum = 0.0, scale_sum = 0.0;
  for (std::uint64_t seed = 200; seed < 205; ++seed) {
    const Scene s = generate_scene(seed, 4, 8, 32, 32, 0.1);
    self_sum += miou(confusion(annotate(s.features, trained_model(), GuidanceMode::kSelf),
                               s.labels, 4)).mean;
    scale_sum += miou(confusion(annotate(s.features, trained_model(), GuidanceMode::kScaleOnly),
                                s.labels, 4)).mean;
  }
  EXPECT_GE(self_sum, scale_sum);
}

TEST(AnnotateTest, ErrorPaths) {
  const LamModel m = identity_model(3, 2, GuidanceMode::kOracle);
  EXPECT_THROW(annotate(FeatureTensor(3, 2, 2), m), InvalidInputError);
  EXPECT_THROW(annotate(FeatureTensor(4, 2, 2), m, GuidanceMode::kSelf), ShapeError);
}

class AnnotateDatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lam_annotate_" + std::string(::testing::UnitTest::GetInstance()
                                              ->current_test_info()
                                              ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "in");
    fs::create_directories(dir_ / "gt");
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(AnnotateDatasetTest, EmptyListWritesNothing) {
  EXPECT_TRUE(annotate_dataset({}, trained_model(), dir_ / "out", GuidanceMode::kSelf).empty());
  std::ostringstream csv;
  write_summary_csv(csv, {}, 2);
  EXPECT_EQ(csv.str(), "image,label_file,status,wall_ms,count_0,count_1,error\n");
}

TEST_F(AnnotateDatasetTest, LabelsFilesAndRecordsFailures) {
  std::vector<fs::path> files;
  for (int i = 0; i < 3; ++i) {
    const Scene s = generate_scene(50 + i, 4, 8, 12, 12, 0.1);
    const fs::path p = dir_ / "in" / ("img" + std::to_string(i) + ".lft");
    save_features(p, s.features);
    save_labels(dir_ / "gt" / ("img" + std::to_string(i) + ".llb"), s.labels);
    files.push_back(p);
  }
  std::ofstream(dir_ / "in" / "img1.lft", std::ios::binary | std::ios::trunc) << "LFT1";
  const Palette palette = default_palette(4);
  AnnotateOptions options;
  options.gt_dir = dir_ / "gt";
  options.palette = &palette;
  const auto summaries =
      annotate_dataset(files, trained_model(), dir_ / "out", GuidanceMode::kOracle, options);
  ASSERT_EQ(summaries.size(), 3u);
  EXPECT_TRUE(summaries[0].ok());
  EXPECT_FALSE(summaries[1].ok());
  EXPECT_NE(summaries[1].error.find("img1.lft"), std::string::npos) << summaries[1].error;
  EXPECT_TRUE(summaries[2].ok());
  for (int i : {0, 2}) {
    const std::string stem = "img" + std::to_string(i);
    const LabelMap out = load_labels(dir_ / "out" / (stem + ".llb"));
    const LabelMap gt = load_labels(dir_ / "gt" / (stem + ".llb"));
    EXPECT_GE(accuracy(out, gt), 0.999);
    EXPECT_TRUE(fs::exists(dir_ / "out" / (stem + ".ppm")));
    std::int64_t total = 0;
    for (std::int64_t n : summaries[i].class_pixel_counts) total += n;
    EXPECT_EQ(total, 144);
  }
  EXPECT_FALSE(fs::exists(dir_ / "out" / "img1.llb"));

  std::ostringstream csv;
  write_summary_csv(csv, summaries, 4);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("img0.lft,img0.llb,ok,", 0), 0u) << line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("img1.lft,,error,", 0), 0u) << line;
}

TEST_F(AnnotateDatasetTest, OracleWithoutGroundTruthDirectory) {
  const Scene s = generate_scene(1, 4, 8, 4, 4, 0.1);
  save_features(dir_ / "in" / "a.lft", s.features);
  EXPECT_THROW(annotate_dataset({dir_ / "in" / "a.lft"}, trained_model(), dir_ / "out",
                                GuidanceMode::kOracle),
               InvalidInputError);
}

}  // namespace
}  // namespace lam
