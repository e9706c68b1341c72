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

#ifndef LAM_DATAIO_H_
#define LAM_DATAIO_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "lam/model.h"
#include "lam/tensor.h"

namespace lam {

// On-disk layouts. All integers little-endian.
//
// Features (.lft): "LFT1" u16 version=1, u32 channels, u32 height, u32 width,
//   then channels*height*width f32 in channel-major order.
// Labels (.llb): "LLB1" u16 version=1, u32 height, u32 width, then
//   height*width u16 ids (0xFFFF = ignore).
// Model (.lamm): "LAMM" u16 version=1, u32 N, u32 C, u32 K, u8 guidance mode,
//   then adapter weights (C*N f64), bias (C f64), alphas (K f64), etas (K f64).
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 18;
inline constexpr std::size_t kLabelHeaderBytes = 14;
inline constexpr std::size_t kModelHeaderBytes = 19;

inline constexpr const char* kFeatureExtension = ".lft";
inline constexpr const char* kLabelExtension = ".llb";
inline constexpr const char* kModelExtension = ".lamm";

// Values are narrowed to f32 on save (round to nearest even) and widened on
// load.
FeatureTensor load_features(const std::filesystem::path& path);
void save_features(const std::filesystem::path& path, const FeatureTensor& t);

LabelMap load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelMap& labels);

LamModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const LamModel& model);

struct PaletteEntry {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::string name;
};

// class_id -> color. CSV rows are class_id,r,g,b,name; an optional header
// row whose first field is not numeric is skipped.
class Palette {
 public:
  void add(int class_id, PaletteEntry entry);
  const PaletteEntry* find(int class_id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<int, PaletteEntry> entries_;
};

Palette parse_palette(std::istream& in);
Palette load_palette(const std::filesystem::path& path);
// Distinct deterministic colors for class ids 0..class_count-1.
Palette default_palette(int class_count);

// Binary PPM (P6, maxval 255). Ignore pixels render black. Throws
// InvalidInputError listing ids missing from the palette.
std::vector<std::uint8_t> render_colorized(const LabelMap& labels,
                                           const Palette& palette);

void write_bytes(const std::filesystem::path& path,
                 const std::vector<std::uint8_t>& bytes);

// Regular files in dir with the given extension, sorted by file name.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::string& extension);

}  // namespace lam

#endif  // LAM_DATAIO_H_
