// AVX2 variants; this file alone is compiled with -mavx2 and only reached
// after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>

#include "kernels_internal.hpp"

namespace oarpost::simd::detail {
namespace {

inline __m256i load(const void* p) { return _mm256_loadu_si256(static_cast<const __m256i*>(p)); }
inline void store(void* p, __m256i v) { _mm256_storeu_si256(static_cast<__m256i*>(p), v); }

inline __m256i majority(__m256i a, __m256i b, __m256i c) {
  return _mm256_or_si256(_mm256_and_si256(a, b), _mm256_and_si256(c, _mm256_or_si256(a, b)));
}

void majority3_u8(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
                  std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) store(out + i, majority(load(a + i), load(b + i), load(c + i)));
  scalar_table().majority3_u8(a + i, b + i, c + i, out + i, n - i);
}

void majority3_u16(const std::uint16_t* a, const std::uint16_t* b, const std::uint16_t* c,
                   std::uint16_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) store(out + i, majority(load(a + i), load(b + i), load(c + i)));
  scalar_table().majority3_u16(a + i, b + i, c + i, out + i, n - i);
}

void and_u8(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) store(out + i, _mm256_and_si256(load(a + i), load(b + i)));
  scalar_table().and_u8(a + i, b + i, out + i, n - i);
}

void or_u8(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) store(out + i, _mm256_or_si256(load(a + i), load(b + i)));
  scalar_table().or_u8(a + i, b + i, out + i, n - i);
}

void decode_u16(const std::uint16_t* words, std::uint16_t code, std::uint8_t* out, std::size_t n) {
  const __m256i vcode = _mm256_set1_epi16(static_cast<short>(code));
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi16(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i lo = _mm256_andnot_si256(
        _mm256_cmpeq_epi16(_mm256_and_si256(load(words + i), vcode), zero), one);
    const __m256i hi = _mm256_andnot_si256(
        _mm256_cmpeq_epi16(_mm256_and_si256(load(words + i + 16), vcode), zero), one);
    // packus interleaves 128-bit lanes; restore order.
    store(out + i, _mm256_permute4x64_epi64(_mm256_packus_epi16(lo, hi), _MM_SHUFFLE(3, 1, 2, 0)));
  }
  scalar_table().decode_u16(words + i, code, out + i, n - i);
}

void encode_u16(const std::uint8_t* bits, std::uint16_t code, std::uint16_t* words, std::size_t n) {
  const __m256i vcode = _mm256_set1_epi16(static_cast<short>(code));
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i wide =
        _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(bits + i)));
    const __m256i set = _mm256_andnot_si256(_mm256_cmpeq_epi16(wide, zero), vcode);
    store(words + i, _mm256_or_si256(load(words + i), set));
  }
  scalar_table().encode_u16(bits + i, code, words + i, n - i);
}

inline std::size_t count_nonzero(__m256i v) {
  const auto zero_lanes = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(v, _mm256_setzero_si256())));
  return static_cast<std::size_t>(32 - __builtin_popcount(zero_lanes));
}

std::size_t count_u8(const std::uint8_t* a, std::size_t n) {
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) c += count_nonzero(load(a + i));
  return c + scalar_table().count_u8(a + i, n - i);
}

std::size_t count_and_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) c += count_nonzero(_mm256_and_si256(load(a + i), load(b + i)));
  return c + scalar_table().count_and_u8(a + i, b + i, n - i);
}

float max_f32(const float* a, std::size_t n) {
  if (n < 8) return scalar_table().max_f32(a, n);
  __m256 m = _mm256_loadu_ps(a);
  std::size_t i = 8;
  for (; i + 8 <= n; i += 8) m = _mm256_max_ps(m, _mm256_loadu_ps(a + i));
  alignas(32) float lanes[8];
  _mm256_store_ps(lanes, m);
  float r = *std::max_element(lanes, lanes + 8);
  for (; i < n; ++i) r = std::max(r, a[i]);
  return r;
}

void scale_f32(const float* in, double num, double den, float* out, std::size_t n) {
  const __m256d vnum = _mm256_set1_pd(num);
  const __m256d vden = _mm256_set1_pd(den);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_cvtps_pd(_mm_loadu_ps(in + i));
    _mm_storeu_ps(out + i, _mm256_cvtpd_ps(_mm256_div_pd(_mm256_mul_pd(x, vnum), vden)));
  }
  scalar_table().scale_f32(in + i, num, den, out + i, n - i);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2",     majority3_u8, majority3_u16, and_u8,  or_u8,
                                 decode_u16, encode_u16,   count_u8,      count_and_u8,
                                 max_f32,    scale_f32};
  return table;
}

}  // namespace oarpost::simd::detail
