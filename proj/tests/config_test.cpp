#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "semijulia/runner.hpp"

using namespace semijulia;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

class ScratchDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("semijulia_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  OutputPaths outputs(const std::string& stem) const {
    return {(dir_ / (stem + ".ppm")).string(), (dir_ / (stem + ".grid")).string(),
            (dir_ / (stem + ".report.txt")).string()};
  }

  std::filesystem::path dir_;
};

const char* kConfig = R"({
  "generators": [
    {"numerator": [[0, 0], [0, 0], [1, 0]], "denominator": [[1, 0]]},
    {"numerator": [[0, 0], [0, 0], [1, 0]], "denominator": [[4, 0]]}
  ],
  "b": [0.5, 0.5],
  "a": [1, 0],
  "method": "random",
  "n": 5000,
  "chains": 2,
  "seed": 9,
  "viewport": {"center": [0, 0], "width": 5, "height": 5, "nx": 64, "ny": 64},
  "image": {"colormap": "ocean", "scale": "linear"}
})";

}  // namespace

TEST(Config, ParsesAndFillsDefaults) {
  const auto cfg = parse_config(json::parse(kConfig));
  ASSERT_EQ(cfg.generators.size(), 2u);
  EXPECT_EQ(cfg.generators[1].denominator, std::vector<Complex>{Complex(4.0)});
  EXPECT_EQ(cfg.burn_in, 100u);
  EXPECT_EQ(cfg.chains, 2u);
  EXPECT_EQ(cfg.image.scale, IntensityScale::Linear);
  EXPECT_EQ(cfg.effective_seeds().size(), 2u);
  const auto sg = make_semigroup(cfg);
  EXPECT_EQ(sg.total_degree(), 4);

  auto no_b = json::parse(kConfig);
  no_b.erase("b");
  EXPECT_DOUBLE_EQ(make_semigroup(parse_config(no_b)).b()[1], 0.5);
}

TEST(Config, ErrorsNameTheField) {
  auto j = json::parse(kConfig);
  j["b"] = {0.5, 0.4};
  try {
    make_semigroup(parse_config(j));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "b");
  }

  j = json::parse(kConfig);
  j["generators"][1]["numerator"][2] = {1, 2, 3};
  try {
    parse_config(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "generators[1].numerator[2]");
  }

  j = json::parse(kConfig);
  j.erase("generators");
  EXPECT_THROW(parse_config(j), ConfigError);

  j = json::parse(kConfig);
  j["method"] = "sideways";
  EXPECT_THROW(parse_config(j), ConfigError);

  j = json::parse(kConfig);
  j["generators"] = json::array({json{{"numerator", {{2, 0}}}}});
  EXPECT_THROW(make_semigroup(parse_config(j)), ConfigError);

  j = json::parse(kConfig);
  j["burn_in"] = 6000;
  EXPECT_THROW(validate_config(parse_config(j)), ConfigError);

  j = json::parse(kConfig);
  j["seeds"] = {4, 4};
  EXPECT_THROW(validate_config(parse_config(j)), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const auto cfg = parse_config(json::parse(kConfig));
  const auto echoed = to_json(cfg);
  EXPECT_EQ(to_json(parse_config(echoed)), echoed);
}

TEST(Config, BuiltinExamplesAreValid) {
  for (const auto& name : example_names()) {
    const auto cfg = builtin_example(name);
    EXPECT_NO_THROW(validate_config(cfg)) << name;
    const auto sg = make_semigroup(cfg);
    EXPECT_NO_THROW(validate_assumptions(sg, cfg.a)) << name;
  }
  EXPECT_THROW(builtin_example("nope"), ConfigError);
}

TEST_F(ScratchDir, RandomRunWritesArtifactsAndIsReproducible) {
  auto cfg = parse_config(json::parse(kConfig));
  cfg.output = outputs("first");
  const auto first = run(cfg);
  EXPECT_EQ(first.exit_code, kExitOk);
  EXPECT_NE(first.report.find("\"burn_in\": 100"), std::string::npos);
  EXPECT_NE(first.report.find("invariance check"), std::string::npos);
  EXPECT_NE(first.report.find("seeds:"), std::string::npos);
  EXPECT_EQ(read_file(cfg.output.report), first.report);

  auto again = cfg;
  again.output = outputs("second");
  again.threads = 2;
  run(again);
  EXPECT_EQ(read_file(cfg.output.grid), read_file(again.output.grid));
  EXPECT_EQ(read_file(cfg.output.image), read_file(again.output.image));
  const auto img = decode_ppm(std::vector<std::uint8_t>(
      [&] { auto s = read_file(cfg.output.image); return std::vector<std::uint8_t>(s.begin(), s.end()); }()));
  EXPECT_EQ(img.width, 64);
}

TEST_F(ScratchDir, CompareOnChebyshevReportsSmallTV) {
  auto cfg = builtin_example("chebyshev");
  cfg.method = Method::Compare;
  cfg.n = 250'000;
  cfg.chains = 4;
  cfg.depth = 16;
  cfg.image.viewport = Viewport{{0.0, 0.0}, 5.0, 5.0, 128, 128};
  cfg.output = outputs("cmp");
  const auto result = run(cfg);
  const auto pos = result.report.find("TV(full, random) = ");
  ASSERT_NE(pos, std::string::npos);
  const double tv = std::stod(result.report.substr(pos + 19));
  EXPECT_LE(tv, 0.05);
  EXPECT_NE(result.report.find("Hausdorff"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "cmp.full.ppm"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "cmp.full.grid"));
}

TEST_F(ScratchDir, FullRunStreamsAboveTheAtomBudget) {
  auto cfg = builtin_example("circle");
  cfg.method = Method::Full;
  cfg.depth = 10;
  cfg.max_atoms = 256;
  cfg.image.viewport = Viewport{{0.0, 0.0}, 3.0, 3.0, 32, 32};
  cfg.output = outputs("full");
  const auto result = run(cfg);
  EXPECT_NE(result.report.find("streamed"), std::string::npos);
  std::ifstream is(cfg.output.grid);
  const auto grid = read_grid(is);
  EXPECT_NEAR(grid.total_mass(), 1.0, 1e-9);

  cfg.method = Method::Compare;
  EXPECT_THROW(run(cfg), BudgetExceeded);
}

TEST_F(ScratchDir, ExceptionalStartPointIsRejected) {
  auto cfg = builtin_example("circle");
  cfg.a = 0.0;
  cfg.n = 1000;
  cfg.output = outputs("exc");
  EXPECT_THROW(run(cfg), ExceptionalStartPoint);
}
