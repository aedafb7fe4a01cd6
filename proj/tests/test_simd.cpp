#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "oarpost/simd.hpp"

using namespace oarpost;

namespace {

const std::size_t kLengths[] = {0, 1, 7, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 1023, 4097};

template <class T>
std::vector<T> random_vec(std::size_t n, std::mt19937_64& rng, T lo, T hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(d(rng));
  return v;
}

class SimdEquivalence : public ::testing::Test {
protected:
  void SetUp() override {
    avx2 = simd::avx2_kernels();
    if (!avx2) GTEST_SKIP() << "AVX2 kernels unavailable on this machine";
  }
  const simd::KernelTable& scalar = simd::scalar_kernels();
  const simd::KernelTable* avx2 = nullptr;
  std::mt19937_64 rng{2024};
};

}  // namespace

TEST_F(SimdEquivalence, Majority) {
  for (auto n : kLengths) {
    auto a = random_vec<std::uint8_t>(n, rng, 0, 1), b = random_vec<std::uint8_t>(n, rng, 0, 1),
         c = random_vec<std::uint8_t>(n, rng, 0, 1);
    std::vector<std::uint8_t> o1(n), o2(n);
    scalar.majority3_u8(a.data(), b.data(), c.data(), o1.data(), n);
    avx2->majority3_u8(a.data(), b.data(), c.data(), o2.data(), n);
    EXPECT_EQ(o1, o2) << n;
    auto wa = random_vec<std::uint16_t>(n, rng, 0, 65535), wb = random_vec<std::uint16_t>(n, rng, 0, 65535),
         wc = random_vec<std::uint16_t>(n, rng, 0, 65535);
    std::vector<std::uint16_t> w1(n), w2(n);
    scalar.majority3_u16(wa.data(), wb.data(), wc.data(), w1.data(), n);
    avx2->majority3_u16(wa.data(), wb.data(), wc.data(), w2.data(), n);
    EXPECT_EQ(w1, w2) << n;
  }
}

TEST_F(SimdEquivalence, LogicAndCounts) {
  for (auto n : kLengths) {
    auto a = random_vec<std::uint8_t>(n, rng, 0, 1), b = random_vec<std::uint8_t>(n, rng, 0, 1);
    std::vector<std::uint8_t> o1(n), o2(n);
    scalar.and_u8(a.data(), b.data(), o1.data(), n);
    avx2->and_u8(a.data(), b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
    scalar.or_u8(a.data(), b.data(), o1.data(), n);
    avx2->or_u8(a.data(), b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
    EXPECT_EQ(scalar.count_u8(a.data(), n), avx2->count_u8(a.data(), n));
    EXPECT_EQ(scalar.count_and_u8(a.data(), b.data(), n), avx2->count_and_u8(a.data(), b.data(), n));
  }
}

TEST_F(SimdEquivalence, Codec) {
  for (auto n : kLengths) {
    auto words = random_vec<std::uint16_t>(n, rng, 0, 255);
    for (std::uint16_t code : {1, 8, 128, 256}) {
      std::vector<std::uint8_t> o1(n), o2(n);
      scalar.decode_u16(words.data(), code, o1.data(), n);
      avx2->decode_u16(words.data(), code, o2.data(), n);
      EXPECT_EQ(o1, o2);
      auto w1 = words, w2 = words;
      scalar.encode_u16(o1.data(), static_cast<std::uint16_t>(code << 1), w1.data(), n);
      avx2->encode_u16(o1.data(), static_cast<std::uint16_t>(code << 1), w2.data(), n);
      EXPECT_EQ(w1, w2);
    }
  }
}

TEST_F(SimdEquivalence, FloatKernels) {
  std::uniform_real_distribution<float> d(-1000.0F, 1000.0F);
  for (auto n : kLengths) {
    if (n == 0) continue;
    std::vector<float> v(n);
    for (auto& x : v) x = d(rng);
    EXPECT_EQ(scalar.max_f32(v.data(), n), avx2->max_f32(v.data(), n));
    std::vector<float> o1(n), o2(n);
    scalar.scale_f32(v.data(), 100.0, 987.654, o1.data(), n);
    avx2->scale_f32(v.data(), 100.0, 987.654, o2.data(), n);
    EXPECT_EQ(o1, o2);
  }
}

TEST(SimdDispatch, ActiveTableCanBeOverridden) {
  const auto& before = simd::active();
  simd::set_active(simd::scalar_kernels());
  EXPECT_STREQ(simd::active().name, "scalar");
  std::vector<std::uint8_t> a{1, 0, 1, 1, 0};
  EXPECT_EQ(simd::count(a), 3U);
  simd::set_active(before);
}
