#include <benchmark/benchmark.h>

#include <random>

#include "photostyle/layers.hpp"
#include "photostyle/network.hpp"
#include "photostyle/wct.hpp"

namespace {

using photostyle::nn::Tensor;

Tensor noise(int c, int h, int w, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Tensor t(c, h, w);
  for (float& v : t.values()) v = u(rng);
  return t;
}

void BM_Conv3x3(benchmark::State& state) {
  const int channels = static_cast<int>(state.range(0));
  const int side = static_cast<int>(state.range(1));
  const Tensor input = noise(channels, side, side, 1);
  const Tensor kernel = noise(channels, channels * 3, 3, 2);
  const std::vector<float> bias(static_cast<std::size_t>(channels), 0.1f);
  const photostyle::nn::KernelView view{channels, channels, 3, 3, kernel.values()};
  const photostyle::nn::ConvGeometry geometry{1, 1, photostyle::nn::Padding::kReflect};
  for (auto _ : state) {
    benchmark::DoNotOptimize(photostyle::nn::conv2d(input, view, bias, geometry));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Conv3x3)->Args({64, 64})->Args({128, 32})->Args({256, 32})->Unit(benchmark::kMillisecond);

void BM_PoolUnpool(benchmark::State& state) {
  const Tensor input = noise(64, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    auto pooled = photostyle::nn::maxpool2d(input, "pool");
    benchmark::DoNotOptimize(photostyle::nn::unpool2d(pooled.output, pooled.mask));
  }
}
BENCHMARK(BM_PoolUnpool)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Encoder(benchmark::State& state) {
  const auto& nets = photostyle::nn::default_networks();
  const auto weights = photostyle::nn::random_weights(nets, 7);
  const int side = static_cast<int>(state.range(0));
  const Tensor image = noise(3, side, side, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(photostyle::nn::forward_encoder(image, nets.encoder, weights, "conv4_1"));
  }
}
BENCHMARK(BM_Encoder)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GlobalWct(benchmark::State& state) {
  const auto c = static_cast<Eigen::Index>(state.range(0));
  const auto n = static_cast<Eigen::Index>(state.range(1));
  const photostyle::wct::Matrix content = photostyle::wct::Matrix::Random(c, n);
  const photostyle::wct::Matrix style = photostyle::wct::Matrix::Random(c, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(photostyle::wct::global_transform(content, style));
  }
}
BENCHMARK(BM_GlobalWct)->Args({64, 16384})->Args({256, 1024})->Args({512, 512})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
