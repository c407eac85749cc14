#include "photostyle/boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "photostyle/errors.hpp"

namespace photostyle {

std::vector<double> luminance(const nn::Tensor& image) {
  if (image.channels() != 3) throw ConfigError("luminance: expected 3 channels");
  const auto r = image.channel(0);
  const auto g = image.channel(1);
  const auto b = image.channel(2);
  std::vector<double> y(image.plane_size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  }
  return y;
}

std::vector<double> sobel_magnitude(const std::vector<double>& plane, int height, int width) {
  auto px = [&](int y, int x) {
    y = std::clamp(y, 0, height - 1);
    x = std::clamp(x, 0, width - 1);
    return plane[static_cast<std::size_t>(y) * width + x];
  };
  std::vector<double> out(plane.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double gx = (px(y - 1, x + 1) + 2 * px(y, x + 1) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2 * px(y, x - 1) + px(y + 1, x - 1));
      const double gy = (px(y + 1, x - 1) + 2 * px(y + 1, x) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2 * px(y - 1, x) + px(y - 1, x + 1));
      out[static_cast<std::size_t>(y) * width + x] = std::hypot(gx, gy);
    }
  }
  return out;
}

double otsu_threshold(const std::vector<double>& values) {
  constexpr int kBins = 256;
  const double top = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (!(top > 0.0)) return 0.0;
  std::array<double, kBins> hist{};
  for (double v : values) {
    const int bin = std::min(kBins - 1, static_cast<int>(v / top * kBins));
    hist[static_cast<std::size_t>(std::max(0, bin))] += 1.0;
  }
  const double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int i = 0; i < kBins; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];

  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_bin = 0;
  for (int i = 0; i < kBins - 1; ++i) {
    w0 += hist[static_cast<std::size_t>(i)];
    sum0 += i * hist[static_cast<std::size_t>(i)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double diff = sum0 / w0 - (sum_all - sum0) / w1;
    const double between = w0 * w1 * diff * diff;
    if (between > best) {
      best = between;
      best_bin = i;
    }
  }
  return (best_bin + 1) * top / kBins;
}

BoundaryScore boundary_score(const nn::Tensor& stylized, const nn::Tensor& content) {
  if (!stylized.same_shape(content)) throw ConfigError("boundary score: image sizes differ");
  const int h = content.height();
  const int w = content.width();
  const auto g_content = sobel_magnitude(luminance(content), h, w);
  const auto g_styl = sobel_magnitude(luminance(stylized), h, w);

  BoundaryScore score;
  score.content_threshold = otsu_threshold(g_content);
  std::vector<char> edge(g_content.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < edge.size(); ++i) {
    edge[i] = g_content[i] > score.content_threshold ? 1 : 0;
    positives += static_cast<std::size_t>(edge[i]);
  }

  std::vector<std::size_t> order(g_styl.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g_styl[a] > g_styl[b]; });

  const bool any_stylized_edge = !order.empty() && g_styl[order.front()] > 0.0;
  if (positives == 0) {
    score.f_measure = any_stylized_edge ? 0.0 : 1.0;
    score.precision = score.recall = score.f_measure;
    return score;
  }

  std::size_t predicted = 0, hits = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double t = g_styl[order[k]];
    if (!(t > 0.0)) break;
    while (k < order.size() && g_styl[order[k]] == t) {
      hits += static_cast<std::size_t>(edge[order[k]]);
      ++predicted;
      ++k;
    }
    score.thresholds.push_back(t);
    const double f = 2.0 * static_cast<double>(hits) / static_cast<double>(predicted + positives);
    if (f > score.f_measure) {
      score.f_measure = f;
      score.threshold = t;
      score.precision = static_cast<double>(hits) / static_cast<double>(predicted);
      score.recall = static_cast<double>(hits) / static_cast<double>(positives);
    }
  }
  return score;
}

}  // namespace photostyle
