#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace photostyle::nn {

struct WeightTensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const noexcept;
  friend bool operator==(const WeightTensor&, const WeightTensor&) = default;
};

/// How the encoder expects its input. Stored in the weight file under
/// kPreprocessEntry as a single float code.
enum class Preprocess : int {
  kUnitRange = 0,       ///< RGB in [0,1] as-is
  kVggMeanSubtract = 1  ///< RGB in [0,1] minus the ImageNet channel mean
};

inline constexpr const char* kPreprocessEntry = "preprocess/convention";
inline constexpr const char* kUntrainedEntry = "meta/untrained";

/// Named float tensors. Immutable once built and safe to share across threads.
class WeightStore {
 public:
  /// Throws ConfigError on a duplicate name or a dims/payload mismatch.
  void insert(std::string name, WeightTensor tensor);

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  /// Throws ConfigError naming the missing tensor.
  const WeightTensor& at(const std::string& name) const;
  std::size_t size() const noexcept { return tensors_.size(); }
  bool empty() const noexcept { return tensors_.empty(); }

  const std::map<std::string, WeightTensor>& tensors() const noexcept { return tensors_; }

  Preprocess preprocess() const;
  /// True when the file is tagged as holding randomly initialised (not trained) weights.
  bool untrained() const;

  friend bool operator==(const WeightStore&, const WeightStore&) = default;

 private:
  std::map<std::string, WeightTensor> tensors_;
};

// FPWT binary layout, all little-endian:
//   "FPWT" | u32 version (=1) | u32 count |
//   count x { u16 name_len | name | u8 rank | u32 dims[rank] | f32 payload[prod(dims)] }
inline constexpr std::uint32_t kWeightFormatVersion = 1;

WeightStore parse_weights(std::span<const std::byte> bytes);
std::vector<std::byte> serialize_weights(const WeightStore& store);

/// Throws IoError if unreadable, FormatError with the byte offset if malformed.
WeightStore load_weights(const std::filesystem::path& path);
void save_weights(const WeightStore& store, const std::filesystem::path& path);

}  // namespace photostyle::nn
