#pragma once

#include <cstdint>
#include <vector>

#include "oarpost/volume.hpp"

namespace oarpost {

/// Per-voxel component ids (0 = background) in raster order of first
/// appearance, so id 1 holds the lexicographically smallest (z,y,x) voxel.
struct ComponentLabeling {
  GridGeometry geometry;
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> sizes;  // indexed by id; sizes[0] is always 0
  int connectivity = 26;

  std::size_t component_count() const { return sizes.empty() ? 0 : sizes.size() - 1; }
  /// Id of the largest component (smallest id among ties); 0 if none.
  std::uint32_t largest() const;
  BinaryMask component_mask(std::uint32_t id) const;
};

/// connectivity in {6, 18, 26}; throws Error otherwise.
ComponentLabeling connected_components_3d(const BinaryMask& mask, int connectivity = 26);

/// 2D bit plane, u fastest.
struct Plane2D {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> bits;

  Plane2D() = default;
  Plane2D(std::int64_t w, std::int64_t h) : width(w), height(h), bits(static_cast<std::size_t>(w * h), 0) {}
  bool test(std::int64_t u, std::int64_t v) const { return bits[static_cast<std::size_t>(v * width + u)] != 0; }
  void set(std::int64_t u, std::int64_t v, bool on = true) {
    bits[static_cast<std::size_t>(v * width + u)] = on ? 1 : 0;
  }
};

struct ComponentLabeling2D {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> sizes;
  int connectivity = 4;

  std::size_t component_count() const { return sizes.empty() ? 0 : sizes.size() - 1; }
};

/// connectivity in {4, 8}; throws Error otherwise.
ComponentLabeling2D connected_components_2d(const Plane2D& plane, int connectivity = 4);

}  // namespace oarpost
