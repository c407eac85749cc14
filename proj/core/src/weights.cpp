#include "photostyle/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "photostyle/errors.hpp"

namespace photostyle::nn {
namespace {

constexpr char kMagic[4] = {'F', 'P', 'W', 'T'};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  std::span<const std::byte> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated ") + what + ": need " + std::to_string(n) +
                            " bytes, " + std::to_string(bytes_.size() - pos_) + " left",
                        pos_);
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T read_le(const char* what) {
    auto raw = take(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(raw[i])) << (8 * i);
    }
    return static_cast<T>(v);
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

template <typename T>
void write_le(std::vector<std::byte>& out, T value) {
  const auto v = static_cast<std::uint64_t>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xffu));
  }
}

std::size_t product(std::span<const std::uint32_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

}  // namespace

std::size_t WeightTensor::element_count() const noexcept { return product(dims); }

void WeightStore::insert(std::string name, WeightTensor tensor) {
  if (tensor.values.size() != tensor.element_count()) {
    throw ConfigError("weight '" + name + "': payload size " +
                      std::to_string(tensor.values.size()) + " does not match dims");
  }
  if (tensors_.count(name) != 0) {
    throw ConfigError("duplicate weight name '" + name + "'");
  }
  tensors_.emplace(std::move(name), std::move(tensor));
}

const WeightTensor& WeightStore::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("missing weight '" + name + "'");
  return it->second;
}

Preprocess WeightStore::preprocess() const {
  auto it = tensors_.find(kPreprocessEntry);
  if (it == tensors_.end() || it->second.values.empty()) return Preprocess::kVggMeanSubtract;
  const int code = static_cast<int>(it->second.values.front());
  switch (code) {
    case 0:
      return Preprocess::kUnitRange;
    case 1:
      return Preprocess::kVggMeanSubtract;
    default:
      throw ConfigError("unknown preprocessing convention code " + std::to_string(code));
  }
}

bool WeightStore::untrained() const {
  auto it = tensors_.find(kUntrainedEntry);
  return it != tensors_.end() && !it->second.values.empty() && it->second.values.front() != 0.0f;
}

WeightStore parse_weights(std::span<const std::byte> bytes) {
  Reader in(bytes);
  auto magic = in.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected FPWT", 0);
  const std::size_t version_at = in.offset();
  const auto version = in.read_le<std::uint32_t>("version");
  if (version != kWeightFormatVersion) {
    throw FormatError("unsupported FPWT version " + std::to_string(version), version_at);
  }
  const auto count = in.read_le<std::uint32_t>("entry count");

  WeightStore store;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::size_t entry_at = in.offset();
    const auto name_len = in.read_le<std::uint16_t>("name length");
    auto name_bytes = in.take(name_len, "name");
    std::string name(reinterpret_cast<const char*>(name_bytes.data()), name_len);
    if (store.contains(name)) throw FormatError("duplicate weight name '" + name + "'", entry_at);

    const auto rank = in.read_le<std::uint8_t>("rank");
    WeightTensor tensor;
    tensor.dims.reserve(rank);
    for (std::uint8_t r = 0; r < rank; ++r) tensor.dims.push_back(in.read_le<std::uint32_t>("dims"));

    const std::size_t n = product(tensor.dims);
    if (n > (bytes.size() - in.offset()) / 4) {
      throw FormatError("truncated payload of '" + name + "': shape needs " + std::to_string(n) +
                            " floats, " + std::to_string((bytes.size() - in.offset()) / 4) +
                            " present",
                        in.offset());
    }
    auto payload = in.take(n * 4, ("payload of '" + name + "'").c_str());
    tensor.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(payload[4 * i + b]))
                << (8 * b);
      }
      tensor.values[i] = std::bit_cast<float>(bits);
    }
    store.insert(std::move(name), std::move(tensor));
  }
  if (!in.at_end()) throw FormatError("trailing bytes after last entry", in.offset());
  return store;
}

std::vector<std::byte> serialize_weights(const WeightStore& store) {
  std::vector<std::byte> out;
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  write_le<std::uint32_t>(out, kWeightFormatVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& [name, tensor] : store.tensors()) {
    if (name.size() > 0xffff) throw ConfigError("weight name too long: " + name.substr(0, 64));
    if (tensor.dims.size() > 0xff) throw ConfigError("weight '" + name + "' has rank > 255");
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    for (char c : name) out.push_back(static_cast<std::byte>(c));
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.dims.size()));
    for (std::uint32_t d : tensor.dims) write_le<std::uint32_t>(out, d);
    for (float v : tensor.values) write_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

WeightStore load_weights(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open weight file " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  return parse_weights(std::as_bytes(std::span<const char>(raw)));
}

void save_weights(const WeightStore& store, const std::filesystem::path& path) {
  const auto bytes = serialize_weights(store);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write weight file " + path.string());
  file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("short write to " + path.string());
}

}  // namespace photostyle::nn
