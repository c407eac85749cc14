#include "photostyle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <utility>

#include "photostyle/errors.hpp"
#include "photostyle/image_io.hpp"

namespace photostyle {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void clamp_unit(nn::Tensor& t) {
  for (float& v : t.values()) v = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
}

nn::NetworkSet networks_for(const PipelineConfig& config) {
  if (config.network_path) return nn::load_networks(*config.network_path);
  return nn::default_networks();
}

nn::WeightStore weights_for(const PipelineConfig& config, const nn::NetworkSet& nets) {
  if (config.weight_path) return nn::load_weights(*config.weight_path);
  return nn::random_weights(nets, config.seed);
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be a positive number");
  wct::normalized_levels(levels);
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(eig_floor > 0.0 && eig_floor < 1.0)) throw ConfigError("eig-floor must lie in (0, 1)");
  if (!(blend >= 0.0 && blend <= 1.0)) throw ConfigError("blend must lie in [0, 1]");
  if (guided.radius < 0) throw ConfigError("guided filter radius must be >= 0");
  if (!(guided.epsilon > 0.0)) throw ConfigError("guided filter epsilon must be positive");
}

smoothing::SmoothingConfig PipelineConfig::smoothing_config() const {
  smoothing::SmoothingConfig s;
  s.mode = mode;
  s.lambda = lambda;
  s.affinity = affinity;
  s.sigma = sigma;
  s.guided = guided;
  return s;
}

wct::StylizeOptions PipelineConfig::stylize_options() const {
  wct::StylizeOptions o;
  o.levels = levels;
  o.eig_floor = eig_floor;
  o.blend = blend;
  return o;
}

std::string TimingReport::to_json() const {
  nlohmann::ordered_json j;
  j["resolution"] = std::to_string(width) + "x" + std::to_string(height);
  j["photowct_s"] = photowct_seconds;
  j["smoothing_s"] = smoothing_seconds;
  j["total_s"] = total_seconds;
  j["mode"] = to_string(mode);
  return j.dump();
}

Stylizer::Stylizer(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
  nets_ = in_stage("network", [&] { return networks_for(config_); });
  weights_ = in_stage("weights", [&] {
    auto w = weights_for(config_, nets_);
    nn::check_weights(nets_, w);
    return w;
  });
}

Stylizer::Stylizer(PipelineConfig config, nn::NetworkSet nets, nn::WeightStore weights)
    : config_(std::move(config)), nets_(std::move(nets)), weights_(std::move(weights)) {
  config_.validate();
  in_stage("weights", [&] {
    nn::validate(nets_);
    nn::check_weights(nets_, weights_);
    return 0;
  });
}

nn::Tensor Stylizer::smooth(const nn::Tensor& y, const nn::Tensor& content) const {
  return in_stage("smoothing", [&] {
    nn::Tensor out = smoothing::smooth(y, content, config_.smoothing_config());
    if (config_.post_filter) {
      auto params = config_.guided;
      if (params.radius <= 0) params.radius = smoothing::default_guided_params(content.height(), content.width()).radius;
      out = smoothing::guided_filter(out, content, params);
      clamp_unit(out);
    }
    return out;
  });
}

StylizeResult Stylizer::run(const nn::Tensor& content, const nn::Tensor& style,
                            const LabelMap* content_labels, const LabelMap* style_labels) const {
  const auto start = Clock::now();
  in_stage("input", [&] {
    if (content.channels() != 3 || style.channels() != 3) throw ConfigError("images must be RGB");
    if ((content_labels == nullptr) != (style_labels == nullptr)) {
      throw ConfigError("label maps must be given for both content and style, or neither");
    }
    if (content_labels != nullptr &&
        (content_labels->height != content.height() || content_labels->width != content.width())) {
      throw ConfigError("content label map is " + std::to_string(content_labels->width) + "x" +
                        std::to_string(content_labels->height) + ", content image is " +
                        std::to_string(content.width()) + "x" + std::to_string(content.height()));
    }
    if (style_labels != nullptr &&
        (style_labels->height != style.height() || style_labels->width != style.width())) {
      throw ConfigError("style label map is " + std::to_string(style_labels->width) + "x" +
                        std::to_string(style_labels->height) + ", style image is " +
                        std::to_string(style.width()) + "x" + std::to_string(style.height()));
    }
    return 0;
  });

  StylizeResult result;
  const auto photowct_start = Clock::now();
  result.photowct = in_stage("photowct", [&] {
    std::optional<LabelMap> cl, sl;
    if (content_labels != nullptr) {
      cl = *content_labels;
      sl = *style_labels;
      align_label_maps(*cl, *sl);
    }
    nn::Tensor y = wct::multi_level_stylize(content, style, nets_, weights_, config_.stylize_options(),
                                            cl ? &*cl : nullptr, sl ? &*sl : nullptr);
    clamp_unit(y);
    return y;
  });
  result.timing.photowct_seconds = seconds_since(photowct_start);

  const auto smoothing_start = Clock::now();
  result.image = smooth(result.photowct, content);
  result.timing.smoothing_seconds = seconds_since(smoothing_start);

  result.timing.total_seconds = seconds_since(start);
  result.timing.width = content.width();
  result.timing.height = content.height();
  result.timing.mode = config_.mode;
  return result;
}

StylizeResult stylize(const std::filesystem::path& content, const std::filesystem::path& style,
                      const std::optional<std::filesystem::path>& content_labels,
                      const std::optional<std::filesystem::path>& style_labels,
                      const PipelineConfig& config) {
  const auto start = Clock::now();
  const Stylizer stylizer(config);
  const nn::Tensor c = in_stage("load content", [&] { return io::load_image(content); });
  const nn::Tensor s = in_stage("load style", [&] { return io::load_image(style); });
  std::optional<LabelMap> cl, sl;
  if (content_labels) cl = in_stage("load content labels", [&] { return load_label_map(*content_labels); });
  if (style_labels) sl = in_stage("load style labels", [&] { return load_label_map(*style_labels); });
  StylizeResult result = stylizer.run(c, s, cl ? &*cl : nullptr, sl ? &*sl : nullptr);
  result.timing.total_seconds = seconds_since(start);
  return result;
}

const char* to_string(SmoothingMode mode) noexcept {
  return mode == SmoothingMode::kExact ? "exact" : "approx";
}

const char* to_string(AffinityKind kind) noexcept {
  return kind == AffinityKind::kMatting ? "matting" : "gaussian";
}

}  // namespace photostyle
