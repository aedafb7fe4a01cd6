#include <gtest/gtest.h>

#include <random>

#include "oarpost/error.hpp"
#include "oarpost/fusion.hpp"
#include "oracles.hpp"

using namespace oarpost;

TEST(Majority, TruthTable) {
  const GridGeometry g({8, 1, 1}, {1, 1, 1});
  BinaryMask a(g), b(g), c(g);
  for (int i = 0; i < 8; ++i) {
    a.set(std::size_t(i), i & 1);
    b.set(std::size_t(i), i & 2);
    c.set(std::size_t(i), i & 4);
  }
  const auto m = majority_vote(a, b, c);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(m.test(std::size_t(i)), std::popcount(unsigned(i)) >= 2) << i;
  EXPECT_THROW(majority_vote(a, b, BinaryMask(GridGeometry({9, 1, 1}, {1, 1, 1}))), Error);
}

TEST(Majority, SymmetricAndMonotone) {
  std::mt19937_64 rng(17);
  const GridGeometry g({13, 11, 7}, {1, 1, 1});
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = oracle::random_mask(g, 0.5, rng), b = oracle::random_mask(g, 0.5, rng),
               c = oracle::random_mask(g, 0.5, rng);
    const auto m = majority_vote(a, b, c);
    EXPECT_EQ(m, majority_vote(c, a, b));
    EXPECT_EQ(m, majority_vote(b, c, a));
    EXPECT_EQ(majority_vote(a, a, a), a);
    const auto bigger = mask_or(a, oracle::random_mask(g, 0.2, rng));
    const auto m2 = majority_vote(bigger, b, c);
    for (std::size_t i = 0; i < m.size(); ++i) EXPECT_TRUE(!m.test(i) || m2.test(i));
  }
}

TEST(FuseMulticlass, MatchesPerClassMajority) {
  const auto reg = ClassRegistry::default_registry();
  std::mt19937_64 rng(23);
  const GridGeometry g({9, 8, 7}, {1, 1, 1});
  auto random_labels = [&] {
    std::map<std::string, BinaryMask> m;
    for (const auto& c : reg->classes()) m.emplace(c.name, oracle::random_mask(g, 0.4, rng));
    return encode(m, reg);
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_labels(), b = random_labels(), c = random_labels();
    const auto f = fuse_multiclass(a, b, c);
    for (const auto& cls : reg->classes()) {
      EXPECT_EQ(decode(f, cls.name), majority_vote(decode(a, cls.name), decode(b, cls.name), decode(c, cls.name)));
    }
  }
  const auto x = random_labels();
  EXPECT_EQ(fuse_multiclass(x, x, x), x);
  EXPECT_EQ(fuse_multiclass(MultiLabelMask(g, reg), x, x), x);
  const auto other = std::make_shared<const ClassRegistry>(ClassRegistry::parse("x 0 0 -\n"));
  EXPECT_THROW(fuse_multiclass(x, x, MultiLabelMask(g, other)), Error);
}
