#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "photostyle/layers.hpp"
#include "photostyle/tensor.hpp"
#include "photostyle/weights.hpp"

namespace photostyle::nn {

struct ConvLayer {
  std::string name;
  int filters = 0;
  int kernel = 3;
  int stride = 1;
  int pad = 1;
  Padding padding = Padding::kReflect;
  bool relu = false;
};

struct MaxPoolLayer {
  std::string name;
  int kernel = 2;
  int stride = 2;
  bool emits_mask = true;
};

struct UnpoolLayer {
  std::string name;
  std::string from;  ///< id of the encoder MaxPool whose mask this layer consumes
};

using LayerSpec = std::variant<ConvLayer, MaxPoolLayer, UnpoolLayer>;

struct NetworkSpec {
  std::string name;
  int input_channels = 3;
  int level = 0;  ///< for decoders: k such that this network inverts conv{k}_1
  std::vector<LayerSpec> layers;

  std::string weight_name(const ConvLayer& conv) const { return name + "." + conv.name + ".weight"; }
  std::string bias_name(const ConvLayer& conv) const { return name + "." + conv.name + ".bias"; }
  /// Channels produced after the last layer; throws ConfigError if the chain is inconsistent.
  int output_channels() const;
};

/// The VGG-19 encoder prefix and the four unpooling decoders, one per level 1..4.
struct NetworkSet {
  NetworkSpec encoder;
  std::map<int, NetworkSpec> decoders;

  const NetworkSpec& decoder(int level) const;
};

/// Parses the plain-text network description. Throws ConfigError with the line number.
///
///   network <name> input=<C> [level=<k>]
///   [<name>] Conv N<filters> K<kernel> S<stride> [P<pad>] [reflect|zero]
///   ReLU
///   [<name>] MaxPool K2 S2
///   [<name>] MaxUnpool from=<pool-layer-id>
///
/// '#' starts a comment. Pad defaults to K/2 with reflect padding.
NetworkSet parse_networks(std::string_view text);
NetworkSet load_networks(const std::filesystem::path& path);

/// The built-in PhotoWCT layout: VGG-19 conv1_1..conv4_1 and the decoder plan per level.
std::string_view default_network_text();
const NetworkSet& default_networks();

/// Channel chaining, decoder input/output widths, and unpool references.
void validate(const NetworkSet& nets);
/// Every conv layer of every network resolves to correctly shaped weights.
void check_weights(const NetworkSet& nets, const WeightStore& weights);

/// He-uniform kernels and zero biases from a seeded generator, tagged untrained.
WeightStore random_weights(const NetworkSet& nets, std::uint64_t seed,
                           Preprocess preprocess = Preprocess::kVggMeanSubtract);

std::string encoder_stop_layer(int level);

struct EncoderOutput {
  Tensor features;
  std::vector<PoolMask> masks;  ///< in encoder order
};

EncoderOutput forward_encoder(const Tensor& image, const NetworkSpec& spec,
                              const WeightStore& weights, std::string_view stop_at);

Tensor forward_decoder(const Tensor& features, const std::vector<PoolMask>& masks,
                       const NetworkSpec& spec, const WeightStore& weights);

}  // namespace photostyle::nn
