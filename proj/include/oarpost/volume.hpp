#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oarpost/geometry.hpp"

namespace oarpost {

/// Scalar intensity grid.
class Volume3D {
public:
  Volume3D() = default;
  explicit Volume3D(const GridGeometry& geometry, float fill = 0.0F);
  /// Throws Error if the value count does not match or a value is not finite.
  Volume3D(const GridGeometry& geometry, std::vector<float> values);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t size() const { return values_.size(); }

  float operator[](std::size_t i) const { return values_[i]; }
  float& operator[](std::size_t i) { return values_[i]; }
  float at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return values_[geometry_.index(x, y, z)];
  }
  float& at(std::int64_t x, std::int64_t y, std::int64_t z) {
    return values_[geometry_.index(x, y, z)];
  }
  float at(const Index3& p) const { return values_[geometry_.index(p)]; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  friend bool operator==(const Volume3D&, const Volume3D&) = default;

private:
  GridGeometry geometry_;
  std::vector<float> values_;
};

/// Single-class segmentation. One byte per voxel holding 0 or 1, so that
/// voxelwise kernels run on contiguous byte spans.
class BinaryMask {
public:
  BinaryMask() = default;
  explicit BinaryMask(const GridGeometry& geometry);
  /// Nonzero entries become 1. Throws Error on size mismatch.
  BinaryMask(const GridGeometry& geometry, std::vector<std::uint8_t> bits);

  const GridGeometry& geometry() const { return geometry_; }
  std::size_t size() const { return bits_.size(); }

  bool test(std::size_t i) const { return bits_[i] != 0; }
  bool test(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return bits_[geometry_.index(x, y, z)] != 0;
  }
  bool test(const Index3& p) const { return bits_[geometry_.index(p)] != 0; }
  /// Out-of-grid positions read as unset.
  bool test_clipped(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return geometry_.contains(x, y, z) && test(x, y, z);
  }
  void set(std::size_t i, bool v = true) { bits_[i] = v ? 1 : 0; }
  void set(std::int64_t x, std::int64_t y, std::int64_t z, bool v = true) {
    bits_[geometry_.index(x, y, z)] = v ? 1 : 0;
  }
  void set(const Index3& p, bool v = true) { bits_[geometry_.index(p)] = v ? 1 : 0; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
  GridGeometry geometry_;
  std::vector<std::uint8_t> bits_;
};

/// Throws Error("geometry mismatch") unless the grids agree.
void require_same_grid(const GridGeometry& a, const GridGeometry& b);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
/// a AND NOT b
BinaryMask mask_minus(const BinaryMask& a, const BinaryMask& b);

}  // namespace oarpost
