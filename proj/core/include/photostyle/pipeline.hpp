#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photostyle/label_map.hpp"
#include "photostyle/network.hpp"
#include "photostyle/photowct.hpp"
#include "photostyle/smoothing.hpp"
#include "photostyle/tensor.hpp"
#include "photostyle/weights.hpp"

namespace photostyle {

using smoothing::AffinityKind;
using smoothing::SmoothingMode;

struct PipelineConfig {
  SmoothingMode mode = SmoothingMode::kExact;
  double lambda = smoothing::kDefaultLambda;
  std::vector<int> levels{4, 3, 2, 1};
  AffinityKind affinity = AffinityKind::kMatting;
  double sigma = 0.1;
  double eig_floor = wct::kDefaultEigFloor;
  double blend = 1.0;
  smoothing::GuidedFilterParams guided{};  ///< radius 0: scaled to the image
  std::uint64_t seed = 0;                  ///< random weights when weight_path is unset
  std::optional<std::filesystem::path> weight_path;
  std::optional<std::filesystem::path> network_path;
  bool post_filter = false;

  /// Throws ConfigError for lambda <= 0, empty or out-of-range levels, and similar.
  void validate() const;
  smoothing::SmoothingConfig smoothing_config() const;
  wct::StylizeOptions stylize_options() const;
};

struct TimingReport {
  double photowct_seconds = 0.0;
  double smoothing_seconds = 0.0;
  double total_seconds = 0.0;
  int width = 0;
  int height = 0;
  SmoothingMode mode = SmoothingMode::kExact;

  /// {"resolution":"WxH","photowct_s":..,"smoothing_s":..,"total_s":..,"mode":..}
  std::string to_json() const;
};

/// A failure inside one pipeline stage ("load", "photowct", "smoothing", "write", ...).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StylizeResult {
  nn::Tensor image;     ///< final output, clamped to [0,1]
  nn::Tensor photowct;  ///< the PhotoWCT stage output Y, clamped to [0,1]
  TimingReport timing;
};

/// Owns the networks and weights for repeated runs with one configuration.
/// `run` is const and safe to call concurrently.
class Stylizer {
 public:
  explicit Stylizer(PipelineConfig config);
  Stylizer(PipelineConfig config, nn::NetworkSet nets, nn::WeightStore weights);

  const PipelineConfig& config() const noexcept { return config_; }
  const nn::WeightStore& weights() const noexcept { return weights_; }
  const nn::NetworkSet& networks() const noexcept { return nets_; }

  /// Label maps are optional but must come as a pair and match their image sizes.
  StylizeResult run(const nn::Tensor& content, const nn::Tensor& style,
                    const LabelMap* content_labels = nullptr,
                    const LabelMap* style_labels = nullptr) const;

  /// Only the smoothing stage (plus the optional post filter) on an existing Y.
  nn::Tensor smooth(const nn::Tensor& y, const nn::Tensor& content) const;

 private:
  PipelineConfig config_;
  nn::NetworkSet nets_;
  nn::WeightStore weights_;
};

/// File-level entry point: loads images and optional label maps, then runs a Stylizer.
StylizeResult stylize(const std::filesystem::path& content, const std::filesystem::path& style,
                      const std::optional<std::filesystem::path>& content_labels,
                      const std::optional<std::filesystem::path>& style_labels,
                      const PipelineConfig& config);

const char* to_string(SmoothingMode mode) noexcept;
const char* to_string(AffinityKind kind) noexcept;

}  // namespace photostyle
