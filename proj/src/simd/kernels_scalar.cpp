// Reference kernels. Every vector variant must match these bit for bit.

#include <algorithm>

#include "kernels_internal.hpp"

namespace oarpost::simd::detail {
namespace {

void majority3_u8(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
                  std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>((a[i] & b[i]) | (c[i] & (a[i] | b[i])));
}

void majority3_u16(const std::uint16_t* a, const std::uint16_t* b, const std::uint16_t* c,
                   std::uint16_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint16_t>((a[i] & b[i]) | (c[i] & (a[i] | b[i])));
}

void and_u8(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(a[i] & b[i]);
}

void or_u8(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(a[i] | b[i]);
}

void decode_u16(const std::uint16_t* words, std::uint16_t code, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (words[i] & code) != 0 ? 1 : 0;
}

void encode_u16(const std::uint8_t* bits, std::uint16_t code, std::uint16_t* words, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (bits[i] != 0) words[i] = static_cast<std::uint16_t>(words[i] | code);
  }
}

std::size_t count_u8(const std::uint8_t* a, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += a[i] != 0 ? 1 : 0;
  return c;
}

std::size_t count_and_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] & b[i]) != 0 ? 1 : 0;
  return c;
}

float max_f32(const float* a, std::size_t n) {
  float m = a[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, a[i]);
  return m;
}

void scale_f32(const float* in, double num, double den, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(double(in[i]) * num / den);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",    majority3_u8, majority3_u16, and_u8,  or_u8,
                                 decode_u16,  encode_u16,   count_u8,      count_and_u8,
                                 max_f32,     scale_f32};
  return table;
}

}  // namespace oarpost::simd::detail
