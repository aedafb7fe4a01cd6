#include <gtest/gtest.h>

#include <filesystem>

#include "cli.hpp"
#include "oarpost/metrics.hpp"
#include "oarpost/nrrd_io.hpp"
#include "oarpost/phantom.hpp"

using namespace oarpost;
namespace fs = std::filesystem;

namespace {

struct CliTest : ::testing::Test {
  static fs::path dir;
  static void SetUpTestSuite() {
    dir = fs::temp_directory_path() / ("oarpost_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    ASSERT_EQ(cli::run({"oarpost", "phantom", "--seed", "3", "--out", dir.string()}), 0);
  }
  static void TearDownTestSuite() { fs::remove_all(dir); }
  static std::string at(const std::string& name) { return (dir / name).string(); }
};
fs::path CliTest::dir;

}  // namespace

TEST_F(CliTest, PhantomWritesAllOutputs) {
  for (const char* f : {"intensity.nrrd", "truth.nrrd", "truth.classes.txt", "pred_axial.nrrd", "pred_coronal.nrrd",
                        "pred_sagittal.nrrd", "corruption_log.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

TEST_F(CliTest, CleanTruthIdentityRun) {
  ASSERT_EQ(cli::run({"oarpost", "postprocess", "--pred", at("truth.nrrd"), "--intensity", at("intensity.nrrd"),
                      "--out", at("clean_post.nrrd")}),
            0);
  ASSERT_EQ(cli::run({"oarpost", "metrics", "--pred", at("truth.nrrd"), "--gt", at("truth.nrrd"), "--out",
                      at("identity")}),
            0);
  const auto r = evaluate(read_label_mask(at("truth.nrrd")), read_label_mask(at("truth.nrrd")));
  for (const auto& c : r.classes) EXPECT_DOUBLE_EQ(c.raw.dice, 1.0);
  EXPECT_EQ(read_file(at("identity.csv")), r.to_csv());
  const auto post = evaluate(read_label_mask(at("clean_post.nrrd")), read_label_mask(at("truth.nrrd")));
  for (const auto& c : post.classes) EXPECT_GE(c.raw.dice, 0.98) << c.name;
}

TEST_F(CliTest, CorruptedTripletThroughPipeline) {
  ASSERT_EQ(cli::run({"oarpost", "--gzip", "fuse", "--axial", at("pred_axial.nrrd"), "--coronal",
                      at("pred_coronal.nrrd"), "--sagittal", at("pred_sagittal.nrrd"), "--out", at("fused.nrrd")}),
            0);
  ASSERT_EQ(cli::run({"oarpost", "--threads", "4", "postprocess", "--pred", at("fused.nrrd"), "--intensity",
                      at("intensity.nrrd"), "--out", at("post.nrrd"), "--sided-out", at("sided.nrrd")}),
            0);
  ASSERT_EQ(cli::run({"oarpost", "metrics", "--pred", at("post.nrrd"), "--gt", at("truth.nrrd"), "--out",
                      at("report")}),
            0);
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
  EXPECT_TRUE(fs::exists(dir / "sided.classes.txt"));
  const auto before = evaluate(read_label_mask(at("fused.nrrd")), read_label_mask(at("truth.nrrd")));
  const auto after = evaluate(read_label_mask(at("post.nrrd")), read_label_mask(at("truth.nrrd")));
  for (const char* c : {"eye", "optic_nerve", "optic_chiasm", "brain"}) {
    EXPECT_LT(after.find(c)->hausdorff_mm, before.find(c)->hausdorff_mm) << c;
  }
}

TEST_F(CliTest, MaskEncodeDecodeRoundTrip) {
  ASSERT_EQ(cli::run({"oarpost", "mask", "decode", "--registry", "default", "--in", at("truth.nrrd"), "--out",
                      at("decoded")}),
            0);
  std::vector<std::string> args{"oarpost", "mask", "encode", "--registry", "default", "--out", at("reenc.nrrd")};
  for (const auto& c : ClassRegistry::default_registry()->classes()) {
    args.push_back("--class");
    args.push_back(c.name + "=" + (dir / "decoded" / (c.name + ".nrrd")).string());
  }
  ASSERT_EQ(cli::run(args), 0);
  EXPECT_EQ(read_label_mask(at("reenc.nrrd")), read_label_mask(at("truth.nrrd")));
}

TEST_F(CliTest, TrainprepCommands) {
  ASSERT_EQ(cli::run({"oarpost", "trainprep", "plan", "--gt", at("truth.nrrd"), "--batch-size", "10",
                      "--orientation", "sagittal", "--seed", "4", "--out", at("plan.csv")}),
            0);
  const auto plan = read_file(at("plan.csv"));
  EXPECT_EQ(std::count(plan.begin(), plan.end(), '\n'), 11);
  ASSERT_EQ(cli::run({"oarpost", "trainprep", "plan", "--gt", at("truth.nrrd"), "--batch-size", "10",
                      "--orientation", "sagittal", "--seed", "4", "--out", at("plan2.csv")}),
            0);
  EXPECT_EQ(read_file(at("plan2.csv")), plan);
  ASSERT_EQ(cli::run({"oarpost", "trainprep", "weights", "--gt", at("truth.nrrd"), "--class", "lens", "--missing",
                      "lens", "--t-c", "0.5", "--out", at("w.nrrd")}),
            0);
  const auto w = read_scalar_volume(at("w.nrrd"));
  const auto eye = decode(read_label_mask(at("truth.nrrd")), "eye");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (eye.test(i)) ASSERT_EQ(w[i], 0.0F);
    else ASSERT_GT(w[i], 0.0F);
  }
}

TEST_F(CliTest, PreprocessGeometry) {
  ASSERT_EQ(cli::run({"oarpost", "preprocess", "--in", at("intensity.nrrd"), "--spacing", "0.7", "0.7", "0.9",
                      "--size", "320", "365", "200", "--scale", "100", "--out", at("pre.nrrd")}),
            0);
  const auto v = read_scalar_volume(at("pre.nrrd"));
  EXPECT_EQ(v.geometry().sizes, (Sizes3{320, 365, 200}));
  EXPECT_EQ(*std::max_element(v.values().begin(), v.values().end()), 100.0F);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cli::run({"oarpost", "fuse", "--axial", at("pred_axial.nrrd")}), 1);
  EXPECT_EQ(cli::run({"oarpost", "bogus"}), 1);
  EXPECT_EQ(cli::run({"oarpost", "metrics", "--pred", at("missing.nrrd"), "--gt", at("truth.nrrd"), "--out",
                      at("x")}),
            2);
  EXPECT_EQ(cli::run({"oarpost", "postprocess", "--pred", at("intensity.nrrd"), "--intensity",
                      at("intensity.nrrd"), "--out", at("x.nrrd")}),
            2);
  EXPECT_EQ(cli::run({"oarpost", "--help"}), 0);
}
