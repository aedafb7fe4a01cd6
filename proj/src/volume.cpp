#include "oarpost/volume.hpp"

#include <cmath>

#include "oarpost/error.hpp"
#include "oarpost/simd.hpp"

namespace oarpost {

Volume3D::Volume3D(const GridGeometry& geometry, float fill)
    : geometry_(geometry), values_(geometry.voxel_count(), fill) {
  geometry_.validate();
}

Volume3D::Volume3D(const GridGeometry& geometry, std::vector<float> values)
    : geometry_(geometry), values_(std::move(values)) {
  geometry_.validate();
  if (values_.size() != geometry_.voxel_count()) throw Error("payload size mismatch");
  for (float v : values_) {
    if (!std::isfinite(v)) throw Error("non-finite intensity");
  }
}

BinaryMask::BinaryMask(const GridGeometry& geometry)
    : geometry_(geometry), bits_(geometry.voxel_count(), 0) {
  geometry_.validate();
}

BinaryMask::BinaryMask(const GridGeometry& geometry, std::vector<std::uint8_t> bits)
    : geometry_(geometry), bits_(std::move(bits)) {
  geometry_.validate();
  if (bits_.size() != geometry_.voxel_count()) throw Error("payload size mismatch");
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t BinaryMask::count() const { return simd::count(bits_); }

void require_same_grid(const GridGeometry& a, const GridGeometry& b) {
  if (!a.same_grid(b)) throw Error("geometry mismatch");
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same_grid(a.geometry(), b.geometry());
  BinaryMask out(a.geometry());
  simd::bit_and(a.bits(), b.bits(), out.bits());
  return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_same_grid(a.geometry(), b.geometry());
  BinaryMask out(a.geometry());
  simd::bit_or(a.bits(), b.bits(), out.bits());
  return out;
}

BinaryMask mask_minus(const BinaryMask& a, const BinaryMask& b) {
  require_same_grid(a.geometry(), b.geometry());
  BinaryMask out(a.geometry());
  auto o = out.bits();
  auto ab = a.bits();
  auto bb = b.bits();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = static_cast<std::uint8_t>(ab[i] & (bb[i] ^ 1U));
  return out;
}

}  // namespace oarpost
