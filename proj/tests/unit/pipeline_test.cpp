#include <gtest/gtest.h>
#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "photostyle/boundary.hpp"
#include "photostyle/cli.hpp"
#include "photostyle/errors.hpp"
#include "photostyle/image_io.hpp"
#include "photostyle/label_map.hpp"
#include "photostyle/pipeline.hpp"

namespace {

using namespace photostyle;
using nn::Tensor;
namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("photostyle_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

using ImageIo = TempDir;

TEST_F(ImageIo, PngRoundTripWithinQuantisation) {
  std::mt19937_64 rng(1);
  const Tensor img = oracle::random_tensor(rng, 3, 13, 17, 0.0f, 1.0f);
  io::write_image(img, path("a.png"));
  const Tensor back = io::load_image(path("a.png"));
  ASSERT_TRUE(back.same_shape(img));
  EXPECT_LE(oracle::max_abs_diff(back, img), 0.5 / 255 + 1e-6);
}

TEST_F(ImageIo, PpmRoundTripWithinQuantisation) {
  std::mt19937_64 rng(2);
  const Tensor img = oracle::random_tensor(rng, 3, 5, 9, 0.0f, 1.0f);
  io::write_image(img, path("a.ppm"));
  EXPECT_EQ(slurp(path("a.ppm")).substr(0, 3), "P6\n");
  EXPECT_LE(oracle::max_abs_diff(io::load_image(path("a.ppm")), img), 0.5 / 255 + 1e-6);
}

TEST_F(ImageIo, WriteClampsOutOfRangeValues) {
  Tensor img(3, 1, 2, std::vector<float>{-1, 2, -1, 2, -1, 2});
  io::write_image(img, path("c.png"));
  const Tensor back = io::load_image(path("c.png"));
  EXPECT_EQ(back.at(0, 0, 0), 0.0f);
  EXPECT_EQ(back.at(0, 0, 1), 1.0f);
}

TEST_F(ImageIo, GrayscaleIsReplicated) {
  write_text(path("g.pgm"), "P2\n# comment\n2 1\n255\n0 51\n");
  const Tensor img = io::load_image(path("g.pgm"));
  ASSERT_EQ(img.channels(), 3);
  for (int c = 0; c < 3; ++c) EXPECT_FLOAT_EQ(img.at(c, 0, 1), 0.2f);

  io::write_image(Tensor(1, 2, 2, 0.6f), path("g.png"));
  const Tensor png = io::load_image(path("g.png"));
  EXPECT_EQ(png.channels(), 3);
  EXPECT_EQ(png.at(2, 1, 1), png.at(0, 1, 1));
}

TEST_F(ImageIo, SixteenBitPngIsRejected) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 2;
  image.format = PNG_FORMAT_LINEAR_Y;
  const std::uint16_t pixels[4] = {0, 1000, 30000, 65535};
  ASSERT_TRUE(png_image_write_to_file(&image, path("deep.png").c_str(), 0, pixels, 0, nullptr));
  try {
    io::load_image(path("deep.png"));
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("16-bit"), std::string::npos);
  }
  write_text(path("deep.ppm"), "P6\n1 1\n65535\nxxxxxx");
  EXPECT_THROW(io::load_image(path("deep.ppm")), IoError);
}

TEST_F(ImageIo, TruncatedAndUnknownFilesAreRejected) {
  write_text(path("t.ppm"), "P6\n4 4\n255\nabc");
  EXPECT_THROW(io::load_image(path("t.ppm")), IoError);
  io::write_image(Tensor(3, 8, 8, 0.5f), path("ok.png"));
  const std::string png = slurp(path("ok.png"));
  write_text(path("t.png"), png.substr(0, png.size() / 2));
  EXPECT_THROW(io::load_image(path("t.png")), IoError);
  write_text(path("x.bmp"), "BM....");
  EXPECT_THROW(io::load_image(path("x.bmp")), IoError);
  EXPECT_THROW(io::load_image(path("missing.png")), IoError);
}

TEST(Resize, PreservesConstantsAndAverages) {
  const Tensor flat(3, 10, 20, 0.25f);
  const Tensor small = io::resize(flat, 5, 7);
  EXPECT_EQ(small.height(), 5);
  EXPECT_EQ(small.width(), 7);
  for (float v : small.values()) EXPECT_NEAR(v, 0.25f, 1e-6);
  // Shrinking a checkerboard 4x averages it to grey away from the clamped edges.
  Tensor checker(1, 16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) checker.at(0, y, x) = static_cast<float>((x + y) % 2);
  const Tensor shrunk = io::resize(checker, 4, 4);
  for (int y = 1; y < 3; ++y)
    for (int x = 1; x < 3; ++x) EXPECT_NEAR(shrunk.at(0, y, x), 0.5f, 1e-6);
}

using LabelMaps = TempDir;

TEST(LabelMap, DistinctValuesBecomeDenseIds) {
  const auto m = make_label_map(1, 4, {255, 0, 128, 0});
  EXPECT_EQ(m.label_count, 3);
  EXPECT_EQ(m.ids, (std::vector<int>{2, 0, 1, 0}));
  EXPECT_EQ(m.raw_values, (std::vector<std::uint32_t>{0, 128, 255}));
  EXPECT_EQ(make_label_map(2, 2, std::vector<std::uint32_t>(4, 9)).label_count, 1);
  EXPECT_THROW(make_label_map(2, 2, {1, 2, 3}), ConfigError);
}

TEST(LabelMap, AlignMatchesByRawValue) {
  auto content = make_label_map(1, 2, {10, 30});
  auto style = make_label_map(1, 3, {30, 20, 20});
  align_label_maps(content, style);
  EXPECT_EQ(content.label_count, 3);
  EXPECT_EQ(style.label_count, 3);
  EXPECT_EQ(content.ids, (std::vector<int>{0, 2}));
  EXPECT_EQ(style.ids, (std::vector<int>{2, 1, 1}));
}

TEST(LabelMap, NearestDownsampleUsesPixelCentres) {
  std::vector<std::uint32_t> raw(16);
  for (int i = 0; i < 16; ++i) raw[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);
  const auto m = make_label_map(4, 4, raw);
  const auto d = downsample_nearest(m, 2, 2);
  EXPECT_EQ(d.ids, (std::vector<int>{5, 7, 13, 15}));
  const auto odd = downsample_nearest(make_label_map(1, 3, {0, 1, 2}), 1, 2);
  EXPECT_EQ(odd.ids, (std::vector<int>{0, 2}));
}

TEST_F(LabelMaps, LoadsGrayAndColourFiles) {
  write_text(path("l.pgm"), "P2\n3 1\n255\n0 128 255\n");
  EXPECT_EQ(load_label_map(path("l.pgm")).ids, (std::vector<int>{0, 1, 2}));
  Tensor rgb(3, 1, 2, 0.0f);
  rgb.at(0, 0, 1) = 1.0f;
  io::write_image(rgb, path("l.png"));
  const auto m = load_label_map(path("l.png"));
  EXPECT_EQ(m.label_count, 2);
  EXPECT_EQ(m.raw_values[1], 0xff0000u);
}

TEST(Boundary, IdenticalImagesScoreOne) {
  std::mt19937_64 rng(3);
  Tensor img(3, 20, 20, 0.1f);
  for (int c = 0; c < 3; ++c)
    for (int y = 5; y < 15; ++y)
      for (int x = 4; x < 12; ++x) img.at(c, y, x) = 0.9f;
  const auto s = boundary_score(img, img);
  EXPECT_DOUBLE_EQ(s.f_measure, 1.0);
  const Tensor noisy = oracle::random_tensor(rng, 3, 20, 20, 0.0f, 1.0f);
  EXPECT_DOUBLE_EQ(boundary_score(noisy, noisy).f_measure, 1.0);
}

TEST(Boundary, ConstantStylizationScoresZero) {
  std::mt19937_64 rng(4);
  const Tensor content = oracle::random_tensor(rng, 3, 16, 16, 0.0f, 1.0f);
  const auto s = boundary_score(Tensor(3, 16, 16, 0.5f), content);
  EXPECT_DOUBLE_EQ(s.f_measure, 0.0);
  EXPECT_TRUE(s.thresholds.empty());
}

TEST(Boundary, ScoreIsBoundedAndThresholdsDescend) {
  std::mt19937_64 rng(5);
  const Tensor a = oracle::random_tensor(rng, 3, 16, 16, 0.0f, 1.0f);
  const Tensor b = oracle::random_tensor(rng, 3, 16, 16, 0.0f, 1.0f);
  const auto s = boundary_score(a, b);
  EXPECT_GE(s.f_measure, 0.0);
  EXPECT_LE(s.f_measure, 1.0);
  EXPECT_TRUE(std::is_sorted(s.thresholds.rbegin(), s.thresholds.rend()));
}

TEST(Boundary, OtsuSeparatesTwoClusters) {
  std::vector<double> v(100, 1.0);
  std::fill(v.begin() + 60, v.end(), 9.0);
  const double t = otsu_threshold(v);
  EXPECT_GT(t, 1.0);
  EXPECT_LT(t, 9.0);
  EXPECT_EQ(otsu_threshold(std::vector<double>(5, 0.0)), 0.0);
}

TEST(Boundary, LuminanceUses601Weights) {
  Tensor img(3, 1, 1, std::vector<float>{1.0f, 0.0f, 0.0f});
  EXPECT_NEAR(luminance(img)[0], 0.299, 1e-7);
}

TEST(Timing, JsonLineHasFixedSchema) {
  TimingReport t;
  t.width = 64;
  t.height = 32;
  t.photowct_seconds = 0.5;
  t.smoothing_seconds = 0.25;
  t.total_seconds = 1.0;
  t.mode = SmoothingMode::kApprox;
  const std::string line = t.to_json();
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["resolution"], "64x32");
  EXPECT_EQ(j["photowct_s"], 0.5);
  EXPECT_EQ(j["smoothing_s"], 0.25);
  EXPECT_EQ(j["total_s"], 1.0);
  EXPECT_EQ(j["mode"], "approx");
  EXPECT_EQ(line.rfind("{\"resolution\"", 0), 0u);
}

TEST(Config, ValidationRejectsBadValues) {
  PipelineConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.levels.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.blend = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Stylizer, OutputMatchesContentSizeInEveryMode) {
  std::mt19937_64 rng(6);
  const Tensor content = oracle::random_tensor(rng, 3, 21, 34, 0.0f, 1.0f);
  const Tensor style = oracle::random_tensor(rng, 3, 40, 24, 0.0f, 1.0f);
  for (auto mode : {SmoothingMode::kExact, SmoothingMode::kApprox}) {
    PipelineConfig cfg;
    cfg.mode = mode;
    cfg.post_filter = mode == SmoothingMode::kApprox;
    const Stylizer s(cfg);
    const auto r = s.run(content, style);
    EXPECT_TRUE(r.image.same_shape(content));
    EXPECT_TRUE(r.photowct.same_shape(content));
    EXPECT_GE(r.timing.total_seconds + 1e-3, r.timing.photowct_seconds + r.timing.smoothing_seconds);
  }
}

TEST(Stylizer, LabelErrorsAreStageTagged) {
  const Tensor img(3, 16, 16, 0.5f);
  const auto good = make_label_map(16, 16, std::vector<std::uint32_t>(256, 0));
  const auto bad = make_label_map(8, 16, std::vector<std::uint32_t>(128, 0));
  const Stylizer s(PipelineConfig{});
  try {
    s.run(img, img, &bad, &good);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "input");
  }
  EXPECT_THROW(s.run(img, img, &good, nullptr), StageError);
}

TEST(Stylizer, SingleLabelMatchesNoLabels) {
  std::mt19937_64 rng(7);
  const Tensor content = oracle::random_tensor(rng, 3, 24, 24, 0.0f, 1.0f);
  const Tensor style = oracle::random_tensor(rng, 3, 24, 24, 0.0f, 1.0f);
  PipelineConfig cfg;
  cfg.mode = SmoothingMode::kApprox;
  const Stylizer s(cfg);
  const auto one = make_label_map(24, 24, std::vector<std::uint32_t>(576, 3));
  EXPECT_LE(oracle::max_abs_diff(s.run(content, style, &one, &one).image, s.run(content, style).image), 1e-6);
}

using Cli = TempDir;

TEST_F(Cli, ParsesFlagsIntoConfig) {
  std::stringstream help;
  const auto o = parse_cli({"--content", "c.png", "--style", "s.png", "--out", "o.png", "--mode", "approx",
                            "--lambda", "1e-4", "--levels", "4,3,2,1", "--affinity", "gaussian", "--sigma",
                            "0.05", "--gf-radius", "3", "--gf-eps", "0.001", "--post-filter", "--seed", "9"},
                           help);
  ASSERT_TRUE(o.has_value());
  EXPECT_EQ(o->config.mode, SmoothingMode::kApprox);
  EXPECT_EQ(o->config.lambda, 1e-4);
  EXPECT_EQ(o->config.levels, (std::vector<int>{4, 3, 2, 1}));
  EXPECT_EQ(o->config.affinity, AffinityKind::kGaussian);
  EXPECT_EQ(o->config.sigma, 0.05);
  EXPECT_EQ(o->config.guided.radius, 3);
  EXPECT_EQ(o->config.guided.epsilon, 0.001);
  EXPECT_TRUE(o->config.post_filter);
  EXPECT_EQ(o->config.seed, 9u);
  EXPECT_EQ(o->out, "o.png");
}

TEST_F(Cli, UsageErrorsExitWithOne) {
  std::stringstream out, err;
  const char* missing[] = {"photostyle", "--content", "c.png", "--out", "o.png"};
  EXPECT_EQ(cli_main(5, missing, out, err), 1);
  EXPECT_NE(err.str().find("--style"), std::string::npos);
  EXPECT_NE(err.str().find("Usage"), std::string::npos);

  const char* bad_lambda[] = {"photostyle", "--content", "c", "--style", "s", "--out", "o", "--lambda", "-1"};
  EXPECT_EQ(cli_main(9, bad_lambda, out, err), 1);
  const char* bad_level[] = {"photostyle", "--content", "c", "--style", "s", "--out", "o", "--levels", "5"};
  EXPECT_EQ(cli_main(9, bad_level, out, err), 1);
}

TEST_F(Cli, RuntimeErrorsExitWithTwo) {
  std::stringstream out, err;
  const std::string missing = path("nope.png").string();
  const std::string out_path = path("o.png").string();
  const char* argv[] = {"photostyle", "--content", missing.c_str(), "--style", missing.c_str(), "--out",
                        out_path.c_str()};
  EXPECT_EQ(cli_main(7, argv, out, err), 2);
  EXPECT_NE(err.str().find("load content"), std::string::npos);
}

TEST_F(Cli, RunWritesImageAndTimingLine) {
  std::mt19937_64 rng(8);
  io::write_image(oracle::random_tensor(rng, 3, 24, 20, 0.0f, 1.0f), path("c.png"));
  io::write_image(oracle::random_tensor(rng, 3, 16, 16, 0.0f, 1.0f), path("s.png"));
  const std::string c = path("c.png").string(), s = path("s.png").string(), o = path("o.png").string();
  std::stringstream out, err;
  const char* argv[] = {"photostyle", "--content", c.c_str(), "--style", s.c_str(), "--out", o.c_str()};
  ASSERT_EQ(cli_main(7, argv, out, err), 0) << err.str();
  ASSERT_TRUE(fs::exists(o));
  const Tensor written = io::load_image(o);
  EXPECT_EQ(written.height(), 24);
  EXPECT_EQ(written.width(), 20);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j["resolution"], "20x24");
  EXPECT_EQ(j["mode"], "exact");
}

TEST_F(Cli, RepeatedRunsAreBitwiseIdentical) {
  std::mt19937_64 rng(9);
  io::write_image(oracle::random_tensor(rng, 3, 24, 24, 0.0f, 1.0f), path("c.png"));
  io::write_image(oracle::random_tensor(rng, 3, 24, 24, 0.0f, 1.0f), path("s.png"));
  const std::string c = path("c.png").string(), s = path("s.png").string();
  const std::string o1 = path("o1.png").string(), o2 = path("o2.png").string();
  std::stringstream out, err;
  const char* a1[] = {"photostyle", "--content", c.c_str(), "--style", s.c_str(), "--out", o1.c_str(), "--seed", "4"};
  const char* a2[] = {"photostyle", "--content", c.c_str(), "--style", s.c_str(), "--out", o2.c_str(), "--seed", "4"};
  ASSERT_EQ(cli_main(9, a1, out, err), 0);
  ASSERT_EQ(cli_main(9, a2, out, err), 0);
  EXPECT_EQ(slurp(o1), slurp(o2));
}

}  // namespace
