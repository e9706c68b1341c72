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

#ifndef LAM_ANNOTATOR_H_
#define LAM_ANNOTATOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lam/dataio.h"
#include "lam/model.h"
#include "lam/tensor.h"

namespace lam {

// Labels one feature image: adapter, cascade in the effective guidance mode
// (mode_override, else model.mode), then per-pixel argmax with ties going to
// the lowest class id. oracle_gt is required iff the effective mode is
// oracle.
LabelMap annotate(const FeatureTensor& features, const LamModel& model,
                  std::optional<GuidanceMode> mode_override = std::nullopt,
                  const LabelMap* oracle_gt = nullptr);

struct AnnotateOptions {
  // Ground-truth directory for oracle mode; <stem>.llb per input.
  std::optional<std::filesystem::path> gt_dir;
  // Writes <stem>.ppm next to each label file when set.
  const Palette* palette = nullptr;
};

struct ImageSummary {
  std::filesystem::path input;
  std::filesystem::path label_file;  // empty on error
  std::vector<std::int64_t> class_pixel_counts;
  double wall_seconds = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

// Labels every file in order and writes <stem>.llb into output_dir. A file
// that fails to load or label is recorded in its summary and skipped.
std::vector<ImageSummary> annotate_dataset(
    const std::vector<std::filesystem::path>& feature_files,
    const LamModel& model, const std::filesystem::path& output_dir,
    GuidanceMode mode, const AnnotateOptions& options = {});

// image,label_file,status,wall_ms,count_0..count_{C-1},error
void write_summary_csv(std::ostream& out,
                       const std::vector<ImageSummary>& summaries,
                       int class_count);

}  // namespace lam

#endif  // LAM_ANNOTATOR_H_
