#include "photostyle/label_map.hpp"

#include <algorithm>
#include <string>

#include "photostyle/errors.hpp"
#include "photostyle/image_io.hpp"

namespace photostyle {
namespace {

void renumber(LabelMap& map, const std::vector<std::uint32_t>& sorted_values) {
  std::vector<int> remap(map.raw_values.size());
  for (std::size_t i = 0; i < map.raw_values.size(); ++i) {
    const auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), map.raw_values[i]);
    remap[i] = static_cast<int>(it - sorted_values.begin());
  }
  for (int& id : map.ids) id = remap[static_cast<std::size_t>(id)];
  map.raw_values = sorted_values;
  map.label_count = static_cast<int>(sorted_values.size());
}

}  // namespace

LabelMap make_label_map(int height, int width, const std::vector<std::uint32_t>& raw) {
  if (height <= 0 || width <= 0) throw ConfigError("label map: size must be positive");
  if (raw.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw ConfigError("label map: expected " + std::to_string(height * width) + " values, got " +
                      std::to_string(raw.size()));
  }
  LabelMap map;
  map.height = height;
  map.width = width;
  map.raw_values = raw;
  std::sort(map.raw_values.begin(), map.raw_values.end());
  map.raw_values.erase(std::unique(map.raw_values.begin(), map.raw_values.end()), map.raw_values.end());
  map.label_count = static_cast<int>(map.raw_values.size());
  map.ids.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    map.ids[i] = static_cast<int>(
        std::lower_bound(map.raw_values.begin(), map.raw_values.end(), raw[i]) - map.raw_values.begin());
  }
  return map;
}

LabelMap load_label_map(const std::filesystem::path& path) {
  const io::RawImage image = io::read_raw_image(path);
  const std::size_t n = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  std::vector<std::uint32_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (image.channels == 1) {
      raw[i] = image.pixels[i];
    } else {
      const std::uint8_t* p = &image.pixels[i * 3];
      raw[i] = (std::uint32_t{p[0]} << 16) | (std::uint32_t{p[1]} << 8) | p[2];
    }
  }
  return make_label_map(image.height, image.width, raw);
}

void align_label_maps(LabelMap& content, LabelMap& style) {
  std::vector<std::uint32_t> all = content.raw_values;
  all.insert(all.end(), style.raw_values.begin(), style.raw_values.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  renumber(content, all);
  renumber(style, all);
}

LabelMap downsample_nearest(const LabelMap& map, int height, int width) {
  if (height <= 0 || width <= 0) throw ConfigError("label map: target size must be positive");
  if (height == map.height && width == map.width) return map;
  LabelMap out;
  out.height = height;
  out.width = width;
  out.label_count = map.label_count;
  out.raw_values = map.raw_values;
  out.ids.resize(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(map.height - 1,
                            static_cast<int>((static_cast<long long>(2 * y + 1) * map.height) / (2LL * height)));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(map.width - 1,
                              static_cast<int>((static_cast<long long>(2 * x + 1) * map.width) / (2LL * width)));
      out.ids[static_cast<std::size_t>(y) * width + x] = map.at(sy, sx);
    }
  }
  return out;
}

}  // namespace photostyle
