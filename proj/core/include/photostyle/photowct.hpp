#pragma once

#include <functional>
#include <vector>

#include "photostyle/label_map.hpp"
#include "photostyle/network.hpp"
#include "photostyle/tensor.hpp"
#include "photostyle/wct.hpp"
#include "photostyle/weights.hpp"

namespace photostyle::wct {

struct StylizeOptions {
  std::vector<int> levels{4, 3, 2, 1};  ///< any non-empty subset of 1..4; run deepest first
  double eig_floor = kDefaultEigFloor;
  double blend = 1.0;
};

enum class Pass { kEncodeContent, kEncodeStyle, kDecode };
using PassObserver = std::function<void(Pass pass, int level)>;

/// Maps an RGB [0,1] image into the encoder's input space and back.
nn::Tensor preprocess(const nn::Tensor& image, nn::Preprocess convention);
nn::Tensor deprocess(const nn::Tensor& image, nn::Preprocess convention);

/// Sorted deepest first, duplicates removed. Throws ConfigError for empty or out-of-range sets.
std::vector<int> normalized_levels(const std::vector<int>& levels);

/// One PhotoWCT pass: encode both images to conv{level}_1, transform, decode with the
/// content's pooling masks. Inputs and output are in encoder space.
nn::Tensor photowct_level(const nn::Tensor& content, const nn::Tensor& style, int level,
                          const nn::NetworkSet& nets, const nn::WeightStore& weights,
                          const StylizeOptions& options, const LabelMap* content_labels,
                          const LabelMap* style_labels, const PassObserver& observer = {});

/// The multi-level cascade. Images are RGB in [0,1]; the result is unclamped.
///
/// Each configured level runs photowct_level on the previous level's output, deepest level
/// first. Label maps, when given, must match their image sizes and are resampled to each
/// feature resolution.
nn::Tensor multi_level_stylize(const nn::Tensor& content, const nn::Tensor& style,
                               const nn::NetworkSet& nets, const nn::WeightStore& weights,
                               const StylizeOptions& options = {},
                               const LabelMap* content_labels = nullptr,
                               const LabelMap* style_labels = nullptr,
                               const PassObserver& observer = {});

}  // namespace photostyle::wct
