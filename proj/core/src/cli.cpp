#include "photostyle/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <map>

#include "photostyle/image_io.hpp"

namespace photostyle {
namespace {

struct RawFlags {
  std::string mode = "exact";
  std::string affinity = "matting";
  std::vector<int> levels{4, 3, 2, 1};
  std::string content_labels, style_labels, weights, network;
};

void build_app(CLI::App& app, CliOptions& o, RawFlags& raw) {
  app.description("Photorealistic style transfer: PhotoWCT stylization followed by manifold smoothing.");
  app.add_option("--content", o.content, "content photo (PNG or PPM)")->required();
  app.add_option("--style", o.style, "style photo (PNG or PPM)")->required();
  auto* out = app.add_option("--out", o.out, "output image; .ppm writes PPM, anything else PNG");
  auto* timing = app.add_flag("--timing-only", o.timing_only, "print timing without writing an image");
  out->excludes(timing);
  app.add_option("--content-labels", raw.content_labels, "content label map");
  app.add_option("--style-labels", raw.style_labels, "style label map");
  app.add_option("--mode", raw.mode, "smoothing step")
      ->check(CLI::IsMember({"exact", "approx"}))
      ->capture_default_str();
  app.add_option("--lambda", o.config.lambda, "smoothing balance")->capture_default_str();
  app.add_option("--levels", raw.levels, "PhotoWCT levels, e.g. 4,3,2,1")
      ->delimiter(',')
      ->check(CLI::Range(1, 4));
  app.add_option("--affinity", raw.affinity, "exact-mode affinity")
      ->check(CLI::IsMember({"matting", "gaussian"}))
      ->capture_default_str();
  app.add_option("--sigma", o.config.sigma, "gaussian affinity bandwidth")->capture_default_str();
  app.add_option("--eig-floor", o.config.eig_floor, "relative eigenvalue floor")->capture_default_str();
  app.add_option("--blend", o.config.blend, "blend of stylized and content features")->capture_default_str();
  app.add_option("--gf-radius", o.config.guided.radius, "guided filter radius (0: auto)")->capture_default_str();
  app.add_option("--gf-eps", o.config.guided.epsilon, "guided filter epsilon")->capture_default_str();
  app.add_flag("--post-filter", o.config.post_filter, "second guided-filter pass after smoothing");
  app.add_option("--weights", raw.weights, "FPWT weight file (default: random weights from --seed)");
  app.add_option("--network", raw.network, "network description (default: built in)");
  app.add_option("--seed", o.config.seed, "seed for random weights")->capture_default_str();
}

}  // namespace

std::optional<CliOptions> parse_cli(const std::vector<std::string>& args, std::ostream& help_out) {
  CliOptions o;
  RawFlags raw;
  CLI::App app{"", "photostyle"};
  build_app(app, o, raw);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    help_out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what(), app.help());
  }
  if (o.out.empty() && !o.timing_only) throw UsageError("--out is required", app.help());
  o.config.mode = raw.mode == "exact" ? SmoothingMode::kExact : SmoothingMode::kApprox;
  o.config.affinity = raw.affinity == "matting" ? AffinityKind::kMatting : AffinityKind::kGaussian;
  o.config.levels = raw.levels;
  if (!raw.content_labels.empty()) o.content_labels = raw.content_labels;
  if (!raw.style_labels.empty()) o.style_labels = raw.style_labels;
  if (o.content_labels.has_value() != o.style_labels.has_value()) {
    throw UsageError("--content-labels and --style-labels must be given together", app.help());
  }
  if (!raw.weights.empty()) o.config.weight_path = raw.weights;
  if (!raw.network.empty()) o.config.network_path = raw.network;
  try {
    o.config.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what(), app.help());
  }
  return o;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::optional<CliOptions> options;
  try {
    options = parse_cli(args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.usage();
    return 1;
  }
  if (!options) return 0;
  try {
    const StylizeResult result = stylize(options->content, options->style, options->content_labels,
                                         options->style_labels, options->config);
    if (!options->timing_only) io::write_image(result.image, options->out);
    out << result.timing.to_json() << std::endl;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace photostyle
