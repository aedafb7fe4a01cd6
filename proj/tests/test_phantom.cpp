#include <gtest/gtest.h>

#include "oarpost/anatomy.hpp"
#include "oarpost/components.hpp"
#include "oarpost/distance.hpp"
#include "oarpost/error.hpp"
#include "oarpost/fusion.hpp"
#include "oarpost/measure.hpp"
#include "oarpost/phantom.hpp"
#include "oracles.hpp"

using namespace oarpost;

namespace {

const Phantom& phantom() {
  static const Phantom p = generate_phantom(12);
  return p;
}

bool subset(const BinaryMask& a, const BinaryMask& b) { return mask_minus(a, b).empty(); }

bool touches(const BinaryMask& a, const BinaryMask& b) {
  const auto d = nearest_feature_distances(a, b);
  for (double x : d)
    if (x < 1.0 + 1e-9) return true;
  return false;
}

}  // namespace

TEST(Phantom, ContainmentAndPresence) {
  const auto& p = phantom();
  EXPECT_EQ(present_classes(p.truth).size(), 8U);
  EXPECT_TRUE(subset(decode(p.truth, "lens"), decode(p.truth, "eye")));
  EXPECT_TRUE(subset(decode(p.truth, "brainstem"), decode(p.truth, "brain")));
  const auto eye = decode(p.truth, "eye");
  const auto cc = connected_components_3d(eye);
  ASSERT_EQ(cc.component_count(), 2U);
  for (std::uint32_t id = 1; id <= 2; ++id) EXPECT_GE(physical_volume(cc.component_mask(id)), 4000.0);
  EXPECT_EQ(connected_components_3d(decode(p.truth, "brain")).component_count(), 1U);
  EXPECT_EQ(connected_components_3d(decode(p.truth, "optic_chiasm")).component_count(), 1U);
}

TEST(Phantom, NervesJoinEyesAndChiasm) {
  const auto& p = phantom();
  const auto nerve = decode(p.truth, "optic_nerve");
  const auto eye = decode(p.truth, "eye");
  const auto chiasm = decode(p.truth, "optic_chiasm");
  const auto cc = connected_components_3d(nerve);
  ASSERT_EQ(cc.component_count(), 2U);
  for (std::uint32_t id = 1; id <= 2; ++id) {
    const auto one = cc.component_mask(id);
    EXPECT_TRUE(touches(one, eye));
    EXPECT_TRUE(touches(one, chiasm));
    // y increases monotonically from eye to chiasm along the generating path.
  }
  for (const auto& axis : p.nerve_axes) {
    ASSERT_GE(axis.size(), 2U);
    for (std::size_t k = 1; k < axis.size(); ++k) EXPECT_EQ(axis[k].y, axis[k - 1].y + 1);
  }
}

TEST(Phantom, FatShellIsBrightest) {
  const auto& p = phantom();
  const auto eye = decode(p.truth, "eye");
  const auto c = barycenter(eye);
  // Fat lies just outside the eye on the lateral side.
  const auto bb = *bounding_box(eye);
  const float fat = p.intensities.at(bb.min.x - 2, std::int64_t(std::lround(c.y)), std::int64_t(std::lround(c.z)));
  EXPECT_GT(fat, 120.0F);
  EXPECT_LT(p.intensities.at(round_to_index(c)), 60.0F);
}

TEST(Phantom, DeterministicAndSizeChecked) {
  const auto a = generate_phantom(5), b = generate_phantom(5), c = generate_phantom(6);
  EXPECT_EQ(a.intensities, b.intensities);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_NE(a.intensities, c.intensities);
  EXPECT_EQ(a.truth, c.truth);
  try {
    generate_phantom(1, GridGeometry({63, 100, 100}, {1, 1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("geometry too small"), std::string::npos);
  }
}

TEST(Corruption, ZeroSpecCopiesTruth) {
  const auto& p = phantom();
  const auto c = corrupt_prediction(p.truth, 1, CorruptionSpec{});
  for (const auto& v : c.variants) EXPECT_EQ(v, p.truth);
  EXPECT_TRUE(c.log.empty());
}

TEST(Corruption, HolesSpansAndDistractors) {
  const auto& p = phantom();
  CorruptionSpec holes;
  holes.classes["brain"].hole_rate = 0.05;
  const auto h = corrupt_prediction(p.truth, 3, holes);
  EXPECT_FALSE(oracle::has_interior_2d_hole(decode(p.truth, "brain"), 2));
  std::size_t hole_events = 0;
  for (const auto& e : h.log) {
    if (e.kind != CorruptionKind::Hole) continue;
    ++hole_events;
    EXPECT_EQ(int(e.variants[0]) + int(e.variants[1]) + int(e.variants[2]), 2);
  }
  EXPECT_GT(hole_events, 0U);
  const auto fused = decode(fuse_multiclass(h.variants[0], h.variants[1], h.variants[2]), "brain");
  EXPECT_TRUE(oracle::has_interior_2d_hole(fused, 2));

  CorruptionSpec span;
  span.classes["optic_nerve"].erase_span_fraction = 0.3;
  span.classes["optic_nerve"].erase_span_count = 1;
  const auto s = corrupt_prediction(p.truth, 3, span);
  for (const auto& v : s.variants) {
    EXPECT_EQ(connected_components_3d(decode(v, "optic_nerve")).component_count(), 3U);
  }

  CorruptionSpec blobs;
  blobs.classes["eye"].distractors = 3;
  const auto d = corrupt_prediction(p.truth, 3, blobs);
  std::size_t events = 0;
  for (const auto& e : d.log) {
    if (e.kind != CorruptionKind::Distractor) continue;
    ++events;
    EXPECT_EQ(int(e.variants[0]) + int(e.variants[1]) + int(e.variants[2]), 2);
  }
  EXPECT_EQ(events, 3U);
  for (const auto& v : d.variants) EXPECT_GT(connected_components_3d(decode(v, "eye")).component_count(), 2U);
}

TEST(Corruption, DeterministicAndValidated) {
  const auto& p = phantom();
  const auto spec = CorruptionSpec::standard();
  const auto a = corrupt_prediction(p.truth, 8, spec), b = corrupt_prediction(p.truth, 8, spec);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(a.variants[k], b.variants[k]);
  EXPECT_NE(a.variants[0], a.variants[1]);
  CorruptionSpec bad;
  bad.classes["brain"].hole_rate = 1.5;
  EXPECT_THROW(bad.validate(), Error);
  bad.classes["brain"].hole_rate = 0.1;
  bad.classes["brain"].distractors = -1;
  EXPECT_THROW(bad.validate(), Error);
}
