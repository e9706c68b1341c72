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

#include <chrono>
#include <cstdio>

#include "lam/errors.h"
#include "lam/optou.h"
#include "lam/sca.h"

namespace lam {
namespace fs = std::filesystem;

LabelMap annotate(const FeatureTensor& features, const LamModel& model,
                  std::optional<GuidanceMode> mode_override,
                  const LabelMap* oracle_gt) {
  model.validate();
  const GuidanceMode mode = mode_override.value_or(model.mode);
  if (features.channels() != model.sca.n_in) {
    throw ShapeError("features have " + std::to_string(features.channels()) +
                     " channels, model expects " + std::to_string(model.sca.n_in));
  }
  if (mode == GuidanceMode::kOracle && oracle_gt == nullptr) {
    throw InvalidInputError("oracle annotation requires a ground-truth label map");
  }
  const FeatureTensor f_sca = sca_forward(features, model.sca);
  const FeatureTensor out = cascade_apply(
      f_sca, model.optou, mode == GuidanceMode::kOracle ? oracle_gt : nullptr, mode);
  return argmax_channels(out);
}

std::vector<ImageSummary> annotate_dataset(const std::vector<fs::path>& feature_files,
                                           const LamModel& model,
                                           const fs::path& output_dir,
                                           GuidanceMode mode,
                                           const AnnotateOptions& options) {
  model.validate();
  std::vector<ImageSummary> summaries;
  if (feature_files.empty()) return summaries;
  if (mode == GuidanceMode::kOracle && !options.gt_dir) {
    throw InvalidInputError("oracle annotation requires a ground-truth directory");
  }
  fs::create_directories(output_dir);

  for (const fs::path& input : feature_files) {
    ImageSummary s;
    s.input = input;
    const auto start = std::chrono::steady_clock::now();
    try {
      const FeatureTensor features = load_features(input);
      std::optional<LabelMap> gt;
      if (mode == GuidanceMode::kOracle) {
        gt = load_labels(*options.gt_dir /
                         (input.stem().string() + kLabelExtension));
      }
      const LabelMap labels =
          annotate(features, model, mode, gt ? &*gt : nullptr);
      const fs::path label_file =
          output_dir / (input.stem().string() + kLabelExtension);
      save_labels(label_file, labels);
      if (options.palette != nullptr) {
        write_bytes(output_dir / (input.stem().string() + ".ppm"),
                    render_colorized(labels, *options.palette));
      }
      s.class_pixel_counts.assign(static_cast<std::size_t>(model.class_count), 0);
      for (std::uint16_t id : labels.ids()) ++s.class_pixel_counts[id];
      s.label_file = label_file;
    } catch (const std::exception& e) {
      s.error = e.what();
      s.class_pixel_counts.clear();
    }
    s.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    summaries.push_back(std::move(s));
  }
  return summaries;
}

void write_summary_csv(std::ostream& out, const std::vector<ImageSummary>& summaries,
                       int class_count) {
  out << "image,label_file,status,wall_ms";
  for (int c = 0; c < class_count; ++c) out << ",count_" << c;
  out << ",error\n";
  for (const ImageSummary& s : summaries) {
    char ms[32];
    std::snprintf(ms, sizeof(ms), "%.3f", s.wall_seconds * 1e3);
    out << s.input.filename().string() << ','
        << s.label_file.filename().string() << ',' << (s.ok() ? "ok" : "error")
        << ',' << ms;
    for (int c = 0; c < class_count; ++c) {
      out << ',';
      if (s.ok()) out << s.class_pixel_counts[static_cast<std::size_t>(c)];
    }
    std::string err = s.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << ',' << err << '\n';
  }
}

}  // namespace lam
