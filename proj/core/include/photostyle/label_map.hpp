#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace photostyle {

/// Per-pixel region ids in 0..label_count-1.
///
/// `raw_values[id]` is the file value (gray level, palette index, or packed RGB) the id came
/// from. Content and style maps are matched by raw value, never by class semantics.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<int> ids;
  int label_count = 0;
  std::vector<std::uint32_t> raw_values;

  int at(int y, int x) const noexcept {
    return ids[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x)];
  }
};

/// Builds a LabelMap from raw per-pixel values, numbering distinct values in ascending order.
LabelMap make_label_map(int height, int width, const std::vector<std::uint32_t>& raw);

/// Reads a grayscale, indexed-color or RGB PNG/PPM; every distinct value is one label.
LabelMap load_label_map(const std::filesystem::path& path);

/// Renumbers both maps over the union of their raw values so equal ids mean equal raw values.
void align_label_maps(LabelMap& content, LabelMap& style);

/// Nearest-neighbour resampling (pixel centres) to height x width.
LabelMap downsample_nearest(const LabelMap& map, int height, int width);

}  // namespace photostyle
