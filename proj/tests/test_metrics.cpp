#include <gtest/gtest.h>

#include <random>

#include "oarpost/error.hpp"
#include "oarpost/fusion.hpp"
#include "oarpost/metrics.hpp"
#include "oarpost/phantom.hpp"
#include "oracles.hpp"

using namespace oarpost;

namespace {

BinaryMask box_mask(const GridGeometry& g, Index3 lo, Index3 hi) {
  BinaryMask m(g);
  for (auto z = lo.z; z <= hi.z; ++z)
    for (auto y = lo.y; y <= hi.y; ++y)
      for (auto x = lo.x; x <= hi.x; ++x) m.set(x, y, z);
  return m;
}

BinaryMask non_empty_random(const GridGeometry& g, double density, std::mt19937_64& rng) {
  auto m = oracle::random_mask(g, density, rng);
  m.set(std::uniform_int_distribution<std::size_t>(0, m.size() - 1)(rng));
  return m;
}

}  // namespace

TEST(Dice, Examples) {
  const GridGeometry g({4, 1, 1}, {1, 1, 1});
  BinaryMask a(g), b(g);
  a.set(0);
  a.set(1);
  b.set(1);
  b.set(2);
  EXPECT_DOUBLE_EQ(dice(a, b), 0.5);
  EXPECT_DOUBLE_EQ(dice(a, a), 1.0);
  BinaryMask c(g);
  c.set(3);
  EXPECT_DOUBLE_EQ(dice(a, c), 0.0);
  try {
    dice(BinaryMask(g), BinaryMask(g));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("undefined overlap"), std::string::npos);
  }
}

TEST(Tolerant, ShiftedCubeIsPerfect) {
  const GridGeometry g({9, 9, 9}, {1, 1, 1});
  const auto gt = box_mask(g, {2, 2, 2}, {6, 6, 6});
  const auto pred = box_mask(g, {3, 2, 2}, {7, 6, 6});
  const auto s = tolerant_overlap(pred, gt);
  EXPECT_DOUBLE_EQ(s.dice, 1.0);
  EXPECT_EQ(s.fp, 0U);
  EXPECT_EQ(s.fn, 0U);
  EXPECT_EQ(s.ignored_fp, 25U);
  EXPECT_EQ(s.ignored_fn, 25U);
  const auto same = tolerant_overlap(gt, gt);
  EXPECT_EQ(same.ignored_fp + same.ignored_fn, 0U);
  EXPECT_DOUBLE_EQ(same.dice, 1.0);
  EXPECT_THROW(tolerant_overlap(gt, BinaryMask(g)), Error);
}

TEST(Tolerant, RandomMatchesVoxelOracle) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const GridGeometry g({12, 12, 12}, {1, 1, 1});
    const auto gt = non_empty_random(g, 0.4, rng), pred = non_empty_random(g, 0.4, rng);
    const auto s = tolerant_overlap(pred, gt);
    const auto o = oracle::tolerant_counts(pred, gt);
    EXPECT_EQ(s.tp, o.tp);
    EXPECT_EQ(s.fp, o.fp);
    EXPECT_EQ(s.fn, o.fn);
    EXPECT_EQ(s.tn, o.tn);
    EXPECT_EQ(s.ignored_fp, o.ignored_fp);
    EXPECT_EQ(s.ignored_fn, o.ignored_fn);
    EXPECT_DOUBLE_EQ(s.dice, 2.0 * double(o.tp) / double(2 * o.tp + o.fp + o.fn));
    EXPECT_DOUBLE_EQ(s.specificity, double(o.tn) / double(o.tn + o.fp));
  }
}

TEST(Distances, Examples) {
  const GridGeometry g({2, 2, 6}, {0.7, 0.7, 0.9});
  BinaryMask a(g), b(g);
  a.set(0, 0, 0);
  b.set(0, 0, 4);
  EXPECT_NEAR(hausdorff(a, b), 3.6, 1e-12);
  EXPECT_DOUBLE_EQ(hausdorff(a, a), 0.0);
  EXPECT_DOUBLE_EQ(mean_distance(a, a), 0.0);
  const GridGeometry unit({4, 1, 1}, {1, 1, 1});
  BinaryMask c(unit), d(unit);
  c.set(0);
  d.set(3);
  EXPECT_DOUBLE_EQ(mean_distance(c, d), 3.0);
  EXPECT_THROW(hausdorff(a, BinaryMask(g)), Error);
  EXPECT_THROW(mean_distance(BinaryMask(g), b), Error);
}

TEST(Distances, RandomMatchAllPairs) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const GridGeometry g({10, 10, 10}, {0.7, 0.8, 0.9});
    const auto a = non_empty_random(g, 0.05, rng), b = non_empty_random(g, 0.05, rng);
    EXPECT_NEAR(hausdorff(a, b), oracle::hausdorff(a, b), 1e-9);
    EXPECT_NEAR(mean_distance(a, b), oracle::mean_distance(a, b), 1e-9);
  }
}

TEST(Evaluate, IdenticalPhantomIsPerfect) {
  const auto p = generate_phantom(1);
  const auto r = evaluate(p.truth, p.truth);
  ASSERT_EQ(r.classes.size(), 8U);
  for (const auto& c : r.classes) {
    ASSERT_TRUE(c.scored());
    EXPECT_DOUBLE_EQ(c.raw.dice, 1.0);
    EXPECT_DOUBLE_EQ(c.hausdorff_mm, 0.0);
    EXPECT_DOUBLE_EQ(c.mean_distance_mm, 0.0);
  }
  EXPECT_NE(r.to_text().find("optic_chiasm"), std::string::npos);
  EXPECT_EQ(r.to_csv().rfind("class,metric,value\n", 0), 0U);
}

TEST(Evaluate, CellsMatchSingleClassCalls) {
  const auto p = generate_phantom(2);
  const auto c = corrupt_prediction(p.truth, 9, CorruptionSpec::standard());
  const auto fused = fuse_multiclass(c.variants[0], c.variants[1], c.variants[2]);
  const auto r = evaluate(fused, p.truth);
  for (const auto& cls : p.truth.registry().classes()) {
    const auto* m = r.find(cls.name);
    ASSERT_NE(m, nullptr);
    const auto a = decode(fused, cls.name), b = decode(p.truth, cls.name);
    EXPECT_DOUBLE_EQ(m->raw.dice, dice(a, b)) << cls.name;
    EXPECT_DOUBLE_EQ(m->hausdorff_mm, hausdorff(a, b)) << cls.name;
    EXPECT_DOUBLE_EQ(m->mean_distance_mm, mean_distance(a, b)) << cls.name;
    EXPECT_EQ(m->tolerant.fp, tolerant_overlap(a, b).fp);
  }
}

TEST(Evaluate, AbsentClassFlagged) {
  const auto reg = ClassRegistry::default_registry();
  const GridGeometry g({6, 6, 6}, {1, 1, 1});
  std::map<std::string, BinaryMask> m{{"brain", box_mask(g, {1, 1, 1}, {4, 4, 4})}};
  const auto gt = encode(m, reg);
  m["eye"] = box_mask(g, {0, 0, 0}, {1, 1, 1});
  const auto pred = encode(m, reg);
  const auto r = evaluate(pred, gt);
  EXPECT_TRUE(r.find("eye")->gt_empty);
  EXPECT_FALSE(r.find("eye")->scored());
  EXPECT_TRUE(r.find("brain")->scored());
  EXPECT_NE(r.to_text().find("absent"), std::string::npos);
  const auto other = std::make_shared<const ClassRegistry>(ClassRegistry::parse("brain 0 0 -\n"));
  EXPECT_THROW(evaluate(pred, MultiLabelMask(g, other)), Error);
}
