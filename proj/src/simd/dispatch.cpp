#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"
#include "oarpost/error.hpp"

namespace oarpost::simd {
namespace {

bool cpu_has_avx2() {
#if defined(OARPOST_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* choose() {
  const char* env = std::getenv("OARPOST_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
  if (const auto* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{choose()};
  return table;
}

void check(bool ok) {
  if (!ok) throw Error("kernel operand length mismatch");
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::scalar_table(); }

const KernelTable* avx2_kernels() {
#if defined(OARPOST_HAVE_AVX2_KERNELS)
  if (cpu_has_avx2()) return &detail::avx2_table();
#endif
  return nullptr;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }
void set_active(const KernelTable& table) { slot().store(&table, std::memory_order_release); }

void majority3(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
               std::span<const std::uint8_t> c, std::span<std::uint8_t> out) {
  check(a.size() == b.size() && b.size() == c.size() && c.size() == out.size());
  active().majority3_u8(a.data(), b.data(), c.data(), out.data(), out.size());
}

void majority3(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
               std::span<const std::uint16_t> c, std::span<std::uint16_t> out) {
  check(a.size() == b.size() && b.size() == c.size() && c.size() == out.size());
  active().majority3_u16(a.data(), b.data(), c.data(), out.data(), out.size());
}

void bit_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::span<std::uint8_t> out) {
  check(a.size() == b.size() && b.size() == out.size());
  active().and_u8(a.data(), b.data(), out.data(), out.size());
}

void bit_or(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::span<std::uint8_t> out) {
  check(a.size() == b.size() && b.size() == out.size());
  active().or_u8(a.data(), b.data(), out.data(), out.size());
}

void decode(std::span<const std::uint16_t> words, std::uint16_t code, std::span<std::uint8_t> out) {
  check(words.size() == out.size());
  active().decode_u16(words.data(), code, out.data(), out.size());
}

void encode(std::span<const std::uint8_t> bits, std::uint16_t code, std::span<std::uint16_t> words) {
  check(bits.size() == words.size());
  active().encode_u16(bits.data(), code, words.data(), words.size());
}

std::size_t count(std::span<const std::uint8_t> a) { return active().count_u8(a.data(), a.size()); }

std::size_t count_and(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  check(a.size() == b.size());
  return active().count_and_u8(a.data(), b.data(), a.size());
}

float max_value(std::span<const float> a) {
  check(!a.empty());
  return active().max_f32(a.data(), a.size());
}

void scale(std::span<const float> in, double num, double den, std::span<float> out) {
  check(in.size() == out.size());
  active().scale_f32(in.data(), num, den, out.data(), out.size());
}

}  // namespace oarpost::simd
