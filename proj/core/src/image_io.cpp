#include "photostyle/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "photostyle/errors.hpp"

namespace photostyle::io {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
}

bool is_png(const std::vector<std::uint8_t>& bytes) {
  static constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kSignature, 8) == 0;
}

RawImage decode_png(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  if ((image.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    png_image_free(&image);
    throw IoError("16-bit PNG is not supported: " + path.string());
  }
  RawImage raw;
  raw.width = static_cast<int>(image.width);
  raw.height = static_cast<int>(image.height);
  raw.channels = (image.format & PNG_FORMAT_FLAG_COLOR) != 0 ? 3 : 1;
  image.format = raw.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  raw.pixels.resize(PNG_IMAGE_SIZE(image));
  // Alpha, if any, is composited onto black.
  const png_color background{0, 0, 0};
  if (!png_image_finish_read(&image, &background, raw.pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw IoError("truncated or corrupt PNG " + path.string() + ": " + message);
  }
  return raw;
}

class PnmParser {
 public:
  PnmParser(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  RawImage parse() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') fail("unsupported image format");
    const char kind = static_cast<char>(bytes_[1]);
    pos_ = 2;
    const bool ascii = kind == '2' || kind == '3';
    RawImage raw;
    if (kind == '2' || kind == '5') {
      raw.channels = 1;
    } else if (kind == '3' || kind == '6') {
      raw.channels = 3;
    } else {
      fail("unsupported PNM variant P" + std::string(1, kind));
    }
    raw.width = next_int();
    raw.height = next_int();
    const int maxval = next_int();
    if (raw.width <= 0 || raw.height <= 0) fail("bad image size");
    if (maxval > 255) fail("16-bit PNM is not supported");
    if (maxval <= 0) fail("bad maxval");
    const std::size_t count = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
    raw.pixels.resize(count);
    if (ascii) {
      for (auto& p : raw.pixels) p = scale(next_int(), maxval);
    } else {
      ++pos_;  // single whitespace byte after maxval
      if (bytes_.size() < pos_ || bytes_.size() - pos_ < count) fail("truncated pixel data");
      for (std::size_t i = 0; i < count; ++i) raw.pixels[i] = scale(bytes_[pos_ + i], maxval);
    }
    return raw;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(what + ": " + path_.string());
  }

  static std::uint8_t scale(int v, int maxval) {
    if (v < 0 || v > maxval) v = std::clamp(v, 0, maxval);
    return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  }

  int next_int() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_]) != 0) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= bytes_.size() || std::isdigit(bytes_[pos_]) == 0) fail("truncated PNM header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]) != 0) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000) fail("PNM value out of range");
    }
    return static_cast<int>(v);
  }

  const std::vector<std::uint8_t>& bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Weights of a triangle filter resampling `in` samples to `out`, pixel-centre aligned.
struct Taps {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

Taps resample_taps(int in, int out) {
  Taps taps;
  const double scale = static_cast<double>(in) / out;
  const double support = std::max(1.0, scale);
  for (int o = 0; o < out; ++o) {
    const double centre = (o + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(centre - support)) + 1;
    const int hi = static_cast<int>(std::ceil(centre + support)) - 1;
    std::vector<double> w;
    double total = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double v = std::max(0.0, 1.0 - std::abs(i - centre) / support);
      w.push_back(v);
      total += v;
    }
    if (total <= 0.0) {
      taps.first.push_back(std::clamp(static_cast<int>(std::lround(centre)), 0, in - 1));
      taps.weights.push_back({1.0});
      continue;
    }
    for (double& v : w) v /= total;
    taps.first.push_back(lo);
    taps.weights.push_back(std::move(w));
  }
  return taps;
}

}  // namespace

RawImage read_raw_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.empty()) throw IoError("empty image file " + path.string());
  if (is_png(bytes)) return decode_png(bytes, path);
  return PnmParser(bytes, path).parse();
}

nn::Tensor to_tensor(const RawImage& raw) {
  nn::Tensor t(3, raw.height, raw.width);
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  for (int c = 0; c < 3; ++c) {
    auto dst = t.channel(c);
    const int src_c = raw.channels == 1 ? 0 : c;
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = static_cast<float>(raw.pixels[i * static_cast<std::size_t>(raw.channels) + src_c]) / 255.0f;
    }
  }
  return t;
}

nn::Tensor load_image(const std::filesystem::path& path) { return to_tensor(read_raw_image(path)); }

void write_image(const nn::Tensor& image, const std::filesystem::path& path) {
  if (image.channels() != 3 && image.channels() != 1) {
    throw IoError("can only write 1- or 3-channel images, got " + std::to_string(image.channels()));
  }
  const int channels = image.channels();
  const std::size_t n = image.plane_size();
  std::vector<std::uint8_t> pixels(n * static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    auto src = image.channel(c);
    for (std::size_t i = 0; i < n; ++i) {
      const float v = std::isfinite(src[i]) ? std::clamp(src[i], 0.0f, 1.0f) : 0.0f;
      pixels[i * static_cast<std::size_t>(channels) + c] =
          static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
  }

  const std::string ext = lower_extension(path);
  if (ext == ".ppm" || ext == ".pnm" || ext == ".pgm") {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + path.string());
    file << (channels == 3 ? "P6\n" : "P5\n") << image.width() << ' ' << image.height() << "\n255\n";
    file.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!file) throw IoError("short write to " + path.string());
    return;
  }

  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw IoError("cannot write PNG " + path.string() + ": " + message);
  }
}

nn::Tensor resize(const nn::Tensor& image, int height, int width) {
  if (height <= 0 || width <= 0) throw ConfigError("resize: target size must be positive");
  if (height == image.height() && width == image.width()) return image;
  const Taps rows = resample_taps(image.height(), height);
  const Taps cols = resample_taps(image.width(), width);
  const int in_h = image.height();
  const int in_w = image.width();

  nn::Tensor horizontal(image.channels(), in_h, width);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < in_h; ++y) {
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        const auto& w = cols.weights[static_cast<std::size_t>(x)];
        for (std::size_t k = 0; k < w.size(); ++k) {
          const int sx = std::clamp(cols.first[static_cast<std::size_t>(x)] + static_cast<int>(k), 0, in_w - 1);
          acc += w[k] * image.at(c, y, sx);
        }
        horizontal.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  nn::Tensor out(image.channels(), height, width);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < height; ++y) {
      const auto& w = rows.weights[static_cast<std::size_t>(y)];
      for (int x = 0; x < width; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          const int sy = std::clamp(rows.first[static_cast<std::size_t>(y)] + static_cast<int>(k), 0, in_h - 1);
          acc += w[k] * horizontal.at(c, sy, x);
        }
        out.at(c, y, x) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace photostyle::io
