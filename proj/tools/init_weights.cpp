// Writes a seeded random FPWT weight file for the default (or a given) network layout.
#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "photostyle/network.hpp"
#include "photostyle/weights.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write randomly initialised PhotoWCT weights in FPWT format", "photostyle_init_weights"};
  std::string out;
  std::string network;
  std::uint64_t seed = 0;
  bool unit_range = false;
  app.add_option("--out", out, "output .fpwt file")->required();
  app.add_option("--network", network, "network description (default: built in)");
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  app.add_flag("--unit-range", unit_range, "tag the encoder as taking [0,1] input without mean subtraction");
  CLI11_PARSE(app, argc, argv);

  try {
    namespace nn = photostyle::nn;
    const nn::NetworkSet nets = network.empty() ? nn::default_networks() : nn::load_networks(network);
    const auto convention = unit_range ? nn::Preprocess::kUnitRange : nn::Preprocess::kVggMeanSubtract;
    const nn::WeightStore store = nn::random_weights(nets, seed, convention);
    nn::save_weights(store, out);
    std::cout << "wrote " << store.size() << " tensors to " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
