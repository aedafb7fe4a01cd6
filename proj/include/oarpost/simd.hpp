#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace oarpost::simd {

/// One implementation of every data-parallel inner loop. Byte masks hold
/// 0/1; label words are bit sets.
struct KernelTable {
  const char* name;
  // out = at least two of (a, b, c)
  void (*majority3_u8)(const std::uint8_t* a, const std::uint8_t* b, const std::uint8_t* c,
                       std::uint8_t* out, std::size_t n);
  // bitwise majority per label bit
  void (*majority3_u16)(const std::uint16_t* a, const std::uint16_t* b, const std::uint16_t* c,
                        std::uint16_t* out, std::size_t n);
  void (*and_u8)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
  void (*or_u8)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out, std::size_t n);
  // out = (words & code) != 0
  void (*decode_u16)(const std::uint16_t* words, std::uint16_t code, std::uint8_t* out,
                     std::size_t n);
  // words |= bits ? code : 0
  void (*encode_u16)(const std::uint8_t* bits, std::uint16_t code, std::uint16_t* words,
                     std::size_t n);
  std::size_t (*count_u8)(const std::uint8_t* a, std::size_t n);
  std::size_t (*count_and_u8)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
  float (*max_f32)(const float* a, std::size_t n);  // n >= 1
  // out = float(double(in) * num / den)
  void (*scale_f32)(const float* in, double num, double den, float* out, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when AVX2 kernels are not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table chosen at first use: AVX2 when available unless OARPOST_SIMD=scalar.
const KernelTable& active();
/// Overrides the active table (tests and benchmarks).
void set_active(const KernelTable& table);

// Span wrappers over the active table.
void majority3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
               std::span<const std::uint8_t> c, std::span<std::uint8_t> out);
void majority3(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
               std::span<const std::uint16_t> c, std::span<std::uint16_t> out);
void bit_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             std::span<std::uint8_t> out);
void bit_or(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
            std::span<std::uint8_t> out);
void decode(std::span<const std::uint16_t> words, std::uint16_t code, std::span<std::uint8_t> out);
void encode(std::span<const std::uint8_t> bits, std::uint16_t code, std::span<std::uint16_t> words);
std::size_t count(std::span<const std::uint8_t> a);
std::size_t count_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
float max_value(std::span<const float> a);
void scale(std::span<const float> in, double num, double den, std::span<float> out);

}  // namespace oarpost::simd
