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

#include "lam/dataio.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lam/errors.h"

namespace lam {
namespace fs = std::filesystem;
namespace {

constexpr std::size_t kChunkValues = 1 << 16;

class ByteWriter {
 public:
  void bytes(const char* s, std::size_t n) { buf_.insert(buf_.end(), s, s + n); }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string describe(const fs::path& path) { return "'" + path.string() + "'"; }

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + describe(path));
  return in;
}

std::uint64_t checked_file_size(const fs::path& path) {
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  if (ec) throw FormatError("cannot stat " + describe(path) + ": " + ec.message());
  return size;
}

// Reads and checks the fixed header; returns its bytes.
std::vector<std::uint8_t> read_header(std::ifstream& in, const fs::path& path,
                                      std::uint64_t size, std::size_t header_bytes,
                                      const char* magic) {
  if (size < header_bytes) {
    throw FormatError(describe(path) + ": truncated header, file ends at byte offset " +
                      std::to_string(size) + ", header needs " +
                      std::to_string(header_bytes) + " bytes");
  }
  std::vector<std::uint8_t> header(header_bytes);
  in.read(reinterpret_cast<char*>(header.data()),
          static_cast<std::streamsize>(header_bytes));
  if (!in) throw FormatError(describe(path) + ": read failed at byte offset 0");
  if (std::memcmp(header.data(), magic, 4) != 0) {
    throw FormatError(describe(path) + ": bad magic at byte offset 0, expected '" +
                      std::string(magic) + "'");
  }
  const std::uint16_t version = get_u16(header.data() + 4);
  if (version != kFormatVersion) {
    throw FormatError(describe(path) + ": unsupported version " +
                      std::to_string(version) + " at byte offset 4");
  }
  return header;
}

void check_payload(const fs::path& path, std::uint64_t size,
                   std::size_t header_bytes, std::uint64_t payload_bytes) {
  const std::uint64_t actual = size - header_bytes;
  if (actual != payload_bytes) {
    throw FormatError(describe(path) + ": payload starting at byte offset " +
                      std::to_string(header_bytes) + " has " +
                      std::to_string(actual) + " bytes, expected " +
                      std::to_string(payload_bytes) +
                      (actual < payload_bytes ? " (truncated at byte offset " +
                                                    std::to_string(size) + ")"
                                              : " (trailing data)"));
  }
}

int checked_dim(std::uint32_t v, const fs::path& path, std::size_t offset) {
  if (v == 0 || v > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw FormatError(describe(path) + ": invalid dimension " + std::to_string(v) +
                      " at byte offset " + std::to_string(offset));
  }
  return static_cast<int>(v);
}

void write_file(const fs::path& path, const std::uint8_t* data, std::size_t n) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + describe(path) + " for writing");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw Error("write to " + describe(path) + " failed");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end != nullptr && *end == '\0';
}

}  // namespace

FeatureTensor load_features(const fs::path& path) {
  const std::uint64_t size = checked_file_size(path);
  std::ifstream in = open_input(path);
  const auto header = read_header(in, path, size, kFeatureHeaderBytes, "LFT1");
  const int channels = checked_dim(get_u32(header.data() + 6), path, 6);
  const int height = checked_dim(get_u32(header.data() + 10), path, 10);
  const int width = checked_dim(get_u32(header.data() + 14), path, 14);
  const std::uint64_t count = static_cast<std::uint64_t>(channels) * height * width;
  check_payload(path, size, kFeatureHeaderBytes, count * 4);

  std::vector<double> data(count);
  std::vector<std::uint8_t> chunk(kChunkValues * 4);
  for (std::uint64_t done = 0; done < count;) {
    const std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(kChunkValues, count - done));
    in.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(n * 4));
    if (!in) {
      throw FormatError(describe(path) + ": read failed at byte offset " +
                        std::to_string(kFeatureHeaderBytes + done * 4));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const float v = std::bit_cast<float>(get_u32(chunk.data() + 4 * i));
      if (!std::isfinite(v)) {
        throw FormatError(describe(path) + ": non-finite value at byte offset " +
                          std::to_string(kFeatureHeaderBytes + (done + i) * 4));
      }
      data[done + i] = v;
    }
    done += n;
  }
  return FeatureTensor(channels, height, width, std::move(data));
}

void save_features(const fs::path& path, const FeatureTensor& t) {
  ByteWriter w;
  w.buffer().reserve(kFeatureHeaderBytes + t.size() * 4);
  w.bytes("LFT1", 4);
  w.u16(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(t.channels()));
  w.u32(static_cast<std::uint32_t>(t.height()));
  w.u32(static_cast<std::uint32_t>(t.width()));
  for (double v : t.data()) w.f32(static_cast<float>(v));
  write_file(path, w.buffer().data(), w.buffer().size());
}

LabelMap load_labels(const fs::path& path) {
  const std::uint64_t size = checked_file_size(path);
  std::ifstream in = open_input(path);
  const auto header = read_header(in, path, size, kLabelHeaderBytes, "LLB1");
  const int height = checked_dim(get_u32(header.data() + 6), path, 6);
  const int width = checked_dim(get_u32(header.data() + 10), path, 10);
  const std::uint64_t count = static_cast<std::uint64_t>(height) * width;
  check_payload(path, size, kLabelHeaderBytes, count * 2);

  std::vector<std::uint8_t> raw(count * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) {
    throw FormatError(describe(path) + ": read failed at byte offset " +
                      std::to_string(kLabelHeaderBytes));
  }
  std::vector<std::uint16_t> ids(count);
  for (std::size_t i = 0; i < count; ++i) ids[i] = get_u16(raw.data() + 2 * i);
  return LabelMap(height, width, std::move(ids));
}

void save_labels(const fs::path& path, const LabelMap& labels) {
  ByteWriter w;
  w.bytes("LLB1", 4);
  w.u16(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(labels.height()));
  w.u32(static_cast<std::uint32_t>(labels.width()));
  for (std::uint16_t id : labels.ids()) w.u16(id);
  write_file(path, w.buffer().data(), w.buffer().size());
}

LamModel load_model(const fs::path& path) {
  const std::uint64_t size = checked_file_size(path);
  std::ifstream in = open_input(path);
  const auto header = read_header(in, path, size, kModelHeaderBytes, "LAMM");
  const int n = checked_dim(get_u32(header.data() + 6), path, 6);
  const int c = checked_dim(get_u32(header.data() + 10), path, 10);
  const int k = checked_dim(get_u32(header.data() + 14), path, 14);
  const std::uint8_t tag = header[18];
  if (tag > static_cast<std::uint8_t>(GuidanceMode::kScaleOnly)) {
    throw FormatError(describe(path) + ": unknown guidance mode tag " +
                      std::to_string(tag) + " at byte offset 18");
  }
  const std::uint64_t values = static_cast<std::uint64_t>(c) * n + c + 2ull * k;
  check_payload(path, size, kModelHeaderBytes, values * 8);

  std::vector<std::uint8_t> raw(values * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) {
    throw FormatError(describe(path) + ": read failed at byte offset " +
                      std::to_string(kModelHeaderBytes));
  }
  std::vector<double> flat(values);
  for (std::size_t i = 0; i < values; ++i) {
    flat[i] = std::bit_cast<double>(get_u64(raw.data() + 8 * i));
  }

  LamModel model;
  model.sca = ScaParams::zeros(n, c);
  model.optou.alphas.assign(static_cast<std::size_t>(k), 0.0);
  model.optou.etas.assign(static_cast<std::size_t>(k), 0.0);
  model.class_count = c;
  model.mode = static_cast<GuidanceMode>(tag);
  model.assign(flat);
  try {
    model.validate();
  } catch (const Error& e) {
    throw FormatError(describe(path) + ": " + e.what());
  }
  return model;
}

void save_model(const fs::path& path, const LamModel& model) {
  model.validate();
  ByteWriter w;
  w.bytes("LAMM", 4);
  w.u16(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.sca.n_in));
  w.u32(static_cast<std::uint32_t>(model.class_count));
  w.u32(static_cast<std::uint32_t>(model.optou.layers()));
  w.u8(static_cast<std::uint8_t>(model.mode));
  for (double v : model.flatten()) w.f64(v);
  write_file(path, w.buffer().data(), w.buffer().size());
}

void Palette::add(int class_id, PaletteEntry entry) {
  if (!entries_.emplace(class_id, std::move(entry)).second) {
    throw InvalidInputError("duplicate palette entry for class " +
                            std::to_string(class_id));
  }
}

const PaletteEntry* Palette::find(int class_id) const {
  auto it = entries_.find(class_id);
  return it == entries_.end() ? nullptr : &it->second;
}

Palette parse_palette(std::istream& in) {
  Palette palette;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    long id = 0;
    if (!parse_int(trim(fields[0]), id)) {
      if (line_no == 1) continue;  // header
      throw InvalidInputError("palette line " + std::to_string(line_no) +
                              ": bad class id '" + fields[0] + "'");
    }
    if (fields.size() < 4) {
      throw InvalidInputError("palette line " + std::to_string(line_no) +
                              ": expected class_id,r,g,b[,name]");
    }
    if (id < 0 || id >= kIgnoreLabel) {
      throw InvalidInputError("palette line " + std::to_string(line_no) +
                              ": class id out of range");
    }
    PaletteEntry e;
    std::uint8_t* rgb[3] = {&e.r, &e.g, &e.b};
    for (int i = 0; i < 3; ++i) {
      long v = 0;
      if (!parse_int(trim(fields[1 + i]), v) || v < 0 || v > 255) {
        throw InvalidInputError("palette line " + std::to_string(line_no) +
                                ": color component '" + fields[1 + i] +
                                "' not in [0,255]");
      }
      *rgb[i] = static_cast<std::uint8_t>(v);
    }
    if (fields.size() > 4) e.name = trim(fields[4]);
    palette.add(static_cast<int>(id), std::move(e));
  }
  return palette;
}

Palette load_palette(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open palette " + describe(path));
  return parse_palette(in);
}

Palette default_palette(int class_count) {
  Palette palette;
  for (int c = 0; c < class_count; ++c) {
    // Bit-interleaved color map (as used by the PASCAL VOC toolkit).
    int r = 0, g = 0, b = 0, id = c + 1;
    for (int shift = 7; shift >= 0 && id > 0; --shift, id >>= 3) {
      r |= (id & 1) << shift;
      g |= ((id >> 1) & 1) << shift;
      b |= ((id >> 2) & 1) << shift;
    }
    palette.add(c, {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                    static_cast<std::uint8_t>(b), "class_" + std::to_string(c)});
  }
  return palette;
}

std::vector<std::uint8_t> render_colorized(const LabelMap& labels,
                                           const Palette& palette) {
  std::set<int> missing;
  for (std::uint16_t id : labels.ids()) {
    if (id != kIgnoreLabel && palette.find(id) == nullptr) missing.insert(id);
  }
  if (!missing.empty()) {
    std::string ids;
    for (int id : missing) ids += (ids.empty() ? "" : ",") + std::to_string(id);
    throw InvalidInputError("palette has no color for class id(s) " + ids);
  }
  const std::string header = "P6\n" + std::to_string(labels.width()) + " " +
                             std::to_string(labels.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + labels.pixel_count() * 3);
  for (std::uint16_t id : labels.ids()) {
    if (id == kIgnoreLabel) {
      out.insert(out.end(), {0, 0, 0});
    } else {
      const PaletteEntry* e = palette.find(id);
      out.insert(out.end(), {e->r, e->g, e->b});
    }
  }
  return out;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, bytes.data(), bytes.size());
}

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw InvalidInputError(describe(dir) + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

}  // namespace lam
