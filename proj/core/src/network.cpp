#include "photostyle/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "photostyle/errors.hpp"

namespace photostyle::nn {
namespace {

#include "default_network.inc"

bool is_keyword(std::string_view token) {
  return token == "Conv" || token == "ReLU" || token == "MaxPool" || token == "MaxUnpool";
}

[[noreturn]] void parse_fail(int line_no, const std::string& message) {
  throw ConfigError("network description line " + std::to_string(line_no) + ": " + message);
}

int parse_prefixed_int(const std::string& token, char prefix, int line_no) {
  if (token.size() < 2 || token[0] != prefix) {
    parse_fail(line_no, "expected " + std::string(1, prefix) + "<int>, got '" + token + "'");
  }
  try {
    std::size_t used = 0;
    const int v = std::stoi(token.substr(1), &used);
    if (used != token.size() - 1) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    parse_fail(line_no, "bad integer in '" + token + "'");
  }
}

std::string key_value(const std::string& token, std::string_view key, int line_no) {
  const std::string prefix = std::string(key) + "=";
  if (token.rfind(prefix, 0) != 0) {
    parse_fail(line_no, "expected " + prefix + "..., got '" + token + "'");
  }
  return token.substr(prefix.size());
}

int key_int(const std::string& token, std::string_view key, int line_no) {
  const std::string value = key_value(token, key, line_no);
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  parse_fail(line_no, "bad integer in '" + token + "'");
}

const std::string& layer_name(const LayerSpec& layer) {
  return std::visit([](const auto& l) -> const std::string& { return l.name; }, layer);
}

// Channels flowing out of each encoder MaxPool, keyed by layer id.
std::map<std::string, int> pool_channels(const NetworkSpec& encoder) {
  std::map<std::string, int> out;
  int channels = encoder.input_channels;
  for (const auto& layer : encoder.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      channels = conv->filters;
    } else if (const auto* pool = std::get_if<MaxPoolLayer>(&layer)) {
      out[pool->name] = channels;
    }
  }
  return out;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [-1, 1).
  double symmetric() { return static_cast<double>(next() >> 11) * 0x1.0p-52 - 1.0; }

 private:
  std::uint64_t state_;
};

const WeightTensor& checked_weight(const WeightStore& weights, const std::string& name,
                                   const std::vector<std::uint32_t>& dims,
                                   const std::string& layer) {
  const WeightTensor& t = weights.at(name);
  if (t.dims != dims) {
    std::string want, got;
    for (auto d : dims) want += (want.empty() ? "" : "x") + std::to_string(d);
    for (auto d : t.dims) got += (got.empty() ? "" : "x") + std::to_string(d);
    throw ConfigError("layer '" + layer + "': weight '" + name + "' has shape " + got +
                      ", expected " + want);
  }
  return t;
}

Tensor run_conv(const Tensor& input, const NetworkSpec& spec, const ConvLayer& conv,
                const WeightStore& weights) {
  const auto in_c = static_cast<std::uint32_t>(input.channels());
  const auto f = static_cast<std::uint32_t>(conv.filters);
  const auto k = static_cast<std::uint32_t>(conv.kernel);
  const std::string qualified = spec.name + "." + conv.name;
  const WeightTensor& w = checked_weight(weights, spec.weight_name(conv), {f, in_c, k, k}, qualified);
  const WeightTensor& b = checked_weight(weights, spec.bias_name(conv), {f}, qualified);
  KernelView view{conv.filters, input.channels(), conv.kernel, conv.kernel, w.values};
  Tensor out = conv2d(input, view, b.values, ConvGeometry{conv.stride, conv.pad, conv.padding},
                      qualified);
  if (conv.relu) relu_inplace(out);
  return out;
}

}  // namespace

int NetworkSpec::output_channels() const {
  int channels = input_channels;
  for (const auto& layer : layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) channels = conv->filters;
  }
  return channels;
}

const NetworkSpec& NetworkSet::decoder(int level) const {
  auto it = decoders.find(level);
  if (it == decoders.end()) {
    throw ConfigError("no decoder for level " + std::to_string(level));
  }
  return it->second;
}

NetworkSet parse_networks(std::string_view text) {
  NetworkSet set;
  std::vector<NetworkSpec> networks;
  std::istringstream stream{std::string(text)};
  std::string line;
  int line_no = 0;
  int anon = 0;

  while (std::getline(stream, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string t; words >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;

    if (tokens[0] == "network") {
      if (tokens.size() < 3) parse_fail(line_no, "expected 'network <name> input=<C>'");
      NetworkSpec spec;
      spec.name = tokens[1];
      spec.input_channels = key_int(tokens[2], "input", line_no);
      if (tokens.size() > 3) spec.level = key_int(tokens[3], "level", line_no);
      networks.push_back(std::move(spec));
      continue;
    }
    if (networks.empty()) parse_fail(line_no, "layer before any 'network' header");
    NetworkSpec& net = networks.back();

    std::string name;
    std::size_t at = 0;
    if (!is_keyword(tokens[0])) {
      name = tokens[0];
      at = 1;
      if (tokens.size() < 2) parse_fail(line_no, "layer '" + name + "' has no kind");
    }
    const std::string& kind = tokens[at];
    const std::vector<std::string> args(tokens.begin() + static_cast<long>(at) + 1, tokens.end());
    if (name.empty() && kind != "ReLU") name = kind + "_" + std::to_string(++anon);

    if (kind == "ReLU") {
      if (!args.empty() || !name.empty()) parse_fail(line_no, "ReLU takes no name or arguments");
      if (net.layers.empty() || !std::holds_alternative<ConvLayer>(net.layers.back())) {
        parse_fail(line_no, "ReLU must follow a Conv layer");
      }
      std::get<ConvLayer>(net.layers.back()).relu = true;
    } else if (kind == "Conv") {
      if (args.size() < 3) parse_fail(line_no, "Conv needs N<filters> K<kernel> S<stride>");
      ConvLayer conv;
      conv.name = name;
      conv.filters = parse_prefixed_int(args[0], 'N', line_no);
      conv.kernel = parse_prefixed_int(args[1], 'K', line_no);
      conv.stride = parse_prefixed_int(args[2], 'S', line_no);
      conv.pad = conv.kernel / 2;
      for (std::size_t i = 3; i < args.size(); ++i) {
        if (args[i] == "reflect") {
          conv.padding = Padding::kReflect;
        } else if (args[i] == "zero") {
          conv.padding = Padding::kZero;
        } else {
          conv.pad = parse_prefixed_int(args[i], 'P', line_no);
        }
      }
      if (conv.filters <= 0 || conv.kernel <= 0 || conv.stride <= 0 || conv.pad < 0) {
        parse_fail(line_no, "Conv parameters must be positive");
      }
      net.layers.emplace_back(std::move(conv));
    } else if (kind == "MaxPool") {
      if (args.size() != 2) parse_fail(line_no, "MaxPool needs K2 S2");
      MaxPoolLayer pool;
      pool.name = name;
      pool.kernel = parse_prefixed_int(args[0], 'K', line_no);
      pool.stride = parse_prefixed_int(args[1], 'S', line_no);
      if (pool.kernel != 2 || pool.stride != 2) parse_fail(line_no, "only MaxPool K2 S2 is supported");
      net.layers.emplace_back(std::move(pool));
    } else if (kind == "MaxUnpool") {
      if (args.size() != 1) parse_fail(line_no, "MaxUnpool needs from=<pool-layer-id>");
      net.layers.emplace_back(UnpoolLayer{name, key_value(args[0], "from", line_no)});
    } else {
      parse_fail(line_no, "unknown layer kind '" + kind + "'");
    }
  }

  bool have_encoder = false;
  for (auto& net : networks) {
    if (net.name == "encoder") {
      if (have_encoder) throw ConfigError("network description declares two encoders");
      set.encoder = std::move(net);
      have_encoder = true;
    } else {
      if (net.level < 1 || net.level > 4) {
        throw ConfigError("decoder '" + net.name + "' needs level=1..4");
      }
      const int level = net.level;
      if (!set.decoders.emplace(level, std::move(net)).second) {
        throw ConfigError("two decoders declared for level " + std::to_string(level));
      }
    }
  }
  if (!have_encoder) throw ConfigError("network description has no 'encoder' network");
  validate(set);
  return set;
}

NetworkSet load_networks(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open network description " + path.string());
  std::ostringstream text;
  text << file.rdbuf();
  return parse_networks(text.str());
}

std::string_view default_network_text() { return kDefaultNetworkText; }

const NetworkSet& default_networks() {
  static const NetworkSet nets = parse_networks(default_network_text());
  return nets;
}

std::string encoder_stop_layer(int level) {
  if (level < 1 || level > 4) throw ConfigError("level must be 1..4, got " + std::to_string(level));
  return "conv" + std::to_string(level) + "_1";
}

void validate(const NetworkSet& nets) {
  std::set<std::string> names;
  int channels = nets.encoder.input_channels;
  std::map<std::string, int> stop_channels;
  for (const auto& layer : nets.encoder.layers) {
    if (!names.insert(layer_name(layer)).second) {
      throw ConfigError("encoder: duplicate layer name '" + layer_name(layer) + "'");
    }
    if (std::holds_alternative<UnpoolLayer>(layer)) {
      throw ConfigError("encoder: unpooling layer '" + layer_name(layer) + "' not allowed");
    }
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      channels = conv->filters;
      stop_channels[conv->name] = channels;
    }
  }
  const auto pools = pool_channels(nets.encoder);

  for (const auto& [level, dec] : nets.decoders) {
    const std::string stop = encoder_stop_layer(level);
    auto it = stop_channels.find(stop);
    if (it == stop_channels.end()) {
      throw ConfigError("decoder '" + dec.name + "': encoder has no layer " + stop);
    }
    if (dec.input_channels != it->second) {
      throw ConfigError("decoder '" + dec.name + "': input=" + std::to_string(dec.input_channels) +
                        " but " + stop + " produces " + std::to_string(it->second) + " channels");
    }
    int c = dec.input_channels;
    std::set<std::string> dec_names;
    for (const auto& layer : dec.layers) {
      if (!dec_names.insert(layer_name(layer)).second) {
        throw ConfigError("decoder '" + dec.name + "': duplicate layer name '" + layer_name(layer) +
                          "'");
      }
      if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
        c = conv->filters;
      } else if (const auto* unpool = std::get_if<UnpoolLayer>(&layer)) {
        auto pool = pools.find(unpool->from);
        if (pool == pools.end()) {
          throw ConfigError("decoder '" + dec.name + "': layer '" + unpool->name +
                            "' references unknown pool '" + unpool->from + "'");
        }
        if (pool->second != c) {
          throw ConfigError("decoder '" + dec.name + "': layer '" + unpool->name + "' receives " +
                            std::to_string(c) + " channels but '" + unpool->from + "' pooled " +
                            std::to_string(pool->second));
        }
      } else {
        throw ConfigError("decoder '" + dec.name + "': max pooling not allowed in a decoder");
      }
    }
    if (c != nets.encoder.input_channels) {
      throw ConfigError("decoder '" + dec.name + "' produces " + std::to_string(c) +
                        " channels, expected " + std::to_string(nets.encoder.input_channels));
    }
  }
}

void check_weights(const NetworkSet& nets, const WeightStore& weights) {
  auto check = [&](const NetworkSpec& spec) {
    int c = spec.input_channels;
    for (const auto& layer : spec.layers) {
      const auto* conv = std::get_if<ConvLayer>(&layer);
      if (conv == nullptr) continue;
      const auto f = static_cast<std::uint32_t>(conv->filters);
      const auto k = static_cast<std::uint32_t>(conv->kernel);
      const std::string qualified = spec.name + "." + conv->name;
      checked_weight(weights, spec.weight_name(*conv), {f, static_cast<std::uint32_t>(c), k, k},
                     qualified);
      checked_weight(weights, spec.bias_name(*conv), {f}, qualified);
      c = conv->filters;
    }
  };
  check(nets.encoder);
  for (const auto& [level, dec] : nets.decoders) check(dec);
}

WeightStore random_weights(const NetworkSet& nets, std::uint64_t seed, Preprocess preprocess) {
  WeightStore store;
  SplitMix64 rng(seed);
  auto fill = [&](const NetworkSpec& spec) {
    int c = spec.input_channels;
    for (const auto& layer : spec.layers) {
      const auto* conv = std::get_if<ConvLayer>(&layer);
      if (conv == nullptr) continue;
      const int fan_in = c * conv->kernel * conv->kernel;
      const double bound = std::sqrt(6.0 / fan_in);
      WeightTensor w;
      w.dims = {static_cast<std::uint32_t>(conv->filters), static_cast<std::uint32_t>(c),
                static_cast<std::uint32_t>(conv->kernel), static_cast<std::uint32_t>(conv->kernel)};
      w.values.resize(w.element_count());
      for (float& v : w.values) v = static_cast<float>(bound * rng.symmetric());
      store.insert(spec.weight_name(*conv), std::move(w));
      store.insert(spec.bias_name(*conv),
                   WeightTensor{{static_cast<std::uint32_t>(conv->filters)},
                                std::vector<float>(static_cast<std::size_t>(conv->filters), 0.0f)});
      c = conv->filters;
    }
  };
  fill(nets.encoder);
  for (const auto& [level, dec] : nets.decoders) fill(dec);
  store.insert(kPreprocessEntry, WeightTensor{{1}, {static_cast<float>(preprocess)}});
  store.insert(kUntrainedEntry, WeightTensor{{1}, {1.0f}});
  return store;
}

EncoderOutput forward_encoder(const Tensor& image, const NetworkSpec& spec,
                              const WeightStore& weights, std::string_view stop_at) {
  const bool known = std::any_of(spec.layers.begin(), spec.layers.end(), [&](const LayerSpec& l) {
    return std::holds_alternative<ConvLayer>(l) && layer_name(l) == stop_at;
  });
  if (!known) {
    throw ConfigError("encoder '" + spec.name + "' has no conv layer '" + std::string(stop_at) + "'");
  }
  if (image.channels() != spec.input_channels) {
    throw ConfigError("encoder '" + spec.name + "' expects " + std::to_string(spec.input_channels) +
                      " input channels, got " + std::to_string(image.channels()));
  }

  EncoderOutput out;
  out.features = image;
  for (const auto& layer : spec.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      out.features = run_conv(out.features, spec, *conv, weights);
      if (conv->name == stop_at) break;
    } else if (const auto* pool = std::get_if<MaxPoolLayer>(&layer)) {
      auto pooled = maxpool2d(out.features, pool->name);
      out.features = std::move(pooled.output);
      if (pool->emits_mask) out.masks.push_back(std::move(pooled.mask));
    } else {
      throw ConfigError("encoder '" + spec.name + "' contains an unpooling layer");
    }
  }
  return out;
}

Tensor forward_decoder(const Tensor& features, const std::vector<PoolMask>& masks,
                       const NetworkSpec& spec, const WeightStore& weights) {
  if (features.channels() != spec.input_channels) {
    throw ConfigError("decoder '" + spec.name + "' expects " + std::to_string(spec.input_channels) +
                      " channels, got " + std::to_string(features.channels()));
  }
  Tensor x = features;
  for (const auto& layer : spec.layers) {
    if (const auto* conv = std::get_if<ConvLayer>(&layer)) {
      x = run_conv(x, spec, *conv, weights);
    } else if (const auto* unpool = std::get_if<UnpoolLayer>(&layer)) {
      auto mask = std::find_if(masks.begin(), masks.end(),
                               [&](const PoolMask& m) { return m.layer_id == unpool->from; });
      if (mask == masks.end()) {
        throw ConfigError("decoder '" + spec.name + "': layer '" + unpool->name +
                          "' needs the mask of '" + unpool->from + "', which was not supplied");
      }
      x = unpool2d(x, *mask);
    } else {
      throw ConfigError("decoder '" + spec.name + "' contains a max pooling layer");
    }
  }
  return x;
}

}  // namespace photostyle::nn
