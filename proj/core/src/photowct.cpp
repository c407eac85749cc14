#include "photostyle/photowct.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "photostyle/errors.hpp"

namespace photostyle::wct {
namespace {

constexpr std::array<float, 3> kImageNetMean = {0.485f, 0.456f, 0.406f};

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix to_matrix(const nn::Tensor& t) {
  const Eigen::Map<const RowMatrixF> m(t.values().data(), t.channels(),
                                       static_cast<Eigen::Index>(t.plane_size()));
  return m.cast<double>();
}

nn::Tensor to_tensor(const Matrix& m, int height, int width) {
  nn::Tensor t(static_cast<int>(m.rows()), height, width);
  Eigen::Map<RowMatrixF> out(t.values().data(), m.rows(), m.cols());
  out = m.cast<float>();
  return t;
}

nn::Tensor shift(const nn::Tensor& image, float sign) {
  if (image.channels() != 3) {
    throw ConfigError("expected a 3-channel image, got " + std::to_string(image.channels()));
  }
  nn::Tensor out = image;
  for (int c = 0; c < 3; ++c) {
    for (float& v : out.channel(c)) v += sign * kImageNetMean[static_cast<std::size_t>(c)];
  }
  return out;
}

std::vector<int> column_labels(const LabelMap& map, int height, int width) {
  return downsample_nearest(map, height, width).ids;
}

}  // namespace

nn::Tensor preprocess(const nn::Tensor& image, nn::Preprocess convention) {
  return convention == nn::Preprocess::kVggMeanSubtract ? shift(image, -1.0f) : image;
}

nn::Tensor deprocess(const nn::Tensor& image, nn::Preprocess convention) {
  return convention == nn::Preprocess::kVggMeanSubtract ? shift(image, 1.0f) : image;
}

std::vector<int> normalized_levels(const std::vector<int>& levels) {
  if (levels.empty()) throw ConfigError("at least one stylization level is required");
  std::vector<int> out = levels;
  for (int level : out) {
    if (level < 1 || level > 4) throw ConfigError("level must be 1..4, got " + std::to_string(level));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nn::Tensor photowct_level(const nn::Tensor& content, const nn::Tensor& style, int level,
                          const nn::NetworkSet& nets, const nn::WeightStore& weights,
                          const StylizeOptions& options, const LabelMap* content_labels,
                          const LabelMap* style_labels, const PassObserver& observer) {
  const std::string stop = nn::encoder_stop_layer(level);
  auto notify = [&](Pass pass) {
    if (observer) observer(pass, level);
  };

  nn::EncoderOutput content_enc = nn::forward_encoder(content, nets.encoder, weights, stop);
  notify(Pass::kEncodeContent);
  const nn::EncoderOutput style_enc = nn::forward_encoder(style, nets.encoder, weights, stop);
  notify(Pass::kEncodeStyle);

  const nn::Tensor& cf = content_enc.features;
  const nn::Tensor& sf = style_enc.features;
  const Matrix content_m = to_matrix(cf);
  const Matrix style_m = to_matrix(sf);
  const std::string context = "level " + std::to_string(level);

  Matrix transformed;
  if (content_labels != nullptr && style_labels != nullptr) {
    const auto cl = column_labels(*content_labels, cf.height(), cf.width());
    const auto sl = column_labels(*style_labels, sf.height(), sf.width());
    transformed = labeled_transform(content_m, style_m, cl, sl, options.eig_floor, options.blend, context);
  } else {
    transformed = global_transform(content_m, style_m, options.eig_floor, options.blend, context);
  }

  nn::Tensor decoded = nn::forward_decoder(to_tensor(transformed, cf.height(), cf.width()),
                                           content_enc.masks, nets.decoder(level), weights);
  notify(Pass::kDecode);
  return decoded;
}

nn::Tensor multi_level_stylize(const nn::Tensor& content, const nn::Tensor& style,
                               const nn::NetworkSet& nets, const nn::WeightStore& weights,
                               const StylizeOptions& options, const LabelMap* content_labels,
                               const LabelMap* style_labels, const PassObserver& observer) {
  if ((content_labels == nullptr) != (style_labels == nullptr)) {
    throw ConfigError("label maps must be given for both content and style, or neither");
  }
  if (content_labels != nullptr &&
      (content_labels->height != content.height() || content_labels->width != content.width())) {
    throw ConfigError("content label map size does not match the content image");
  }
  if (style_labels != nullptr &&
      (style_labels->height != style.height() || style_labels->width != style.width())) {
    throw ConfigError("style label map size does not match the style image");
  }
  const nn::Preprocess convention = weights.preprocess();
  const nn::Tensor style_in = preprocess(style, convention);
  nn::Tensor current = preprocess(content, convention);
  for (int level : normalized_levels(options.levels)) {
    current = photowct_level(current, style_in, level, nets, weights, options, content_labels,
                             style_labels, observer);
  }
  return deprocess(current, convention);
}

}  // namespace photostyle::wct
