#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>

namespace oarpost {

/// Integer voxel coordinate. Axes: x = right->left, y = anterior->posterior,
/// z = inferior->superior.
struct Index3 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  friend auto operator<=>(const Index3&, const Index3&) = default;
};

/// Real-valued point in voxel or physical coordinates.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

using Sizes3 = std::array<std::int64_t, 3>;
using Spacing3 = std::array<double, 3>;

/// Dense grid description. Storage is row-major with x fastest.
struct GridGeometry {
  Sizes3 sizes{1, 1, 1};
  Spacing3 spacing{1.0, 1.0, 1.0};  // mm per voxel
  Spacing3 origin{0.0, 0.0, 0.0};   // mm, position of voxel (0,0,0)

  GridGeometry() = default;
  GridGeometry(Sizes3 s, Spacing3 sp, Spacing3 o = {0.0, 0.0, 0.0});

  /// Throws Error unless all sizes >= 1 and all spacings > 0.
  void validate() const;

  std::int64_t nx() const { return sizes[0]; }
  std::int64_t ny() const { return sizes[1]; }
  std::int64_t nz() const { return sizes[2]; }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(sizes[0] * sizes[1] * sizes[2]);
  }
  double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }

  std::size_t index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>((z * sizes[1] + y) * sizes[0] + x);
  }
  std::size_t index(const Index3& p) const { return index(p.x, p.y, p.z); }
  Index3 coords(std::size_t i) const {
    const auto ii = static_cast<std::int64_t>(i);
    return {ii % sizes[0], (ii / sizes[0]) % sizes[1], ii / (sizes[0] * sizes[1])};
  }
  bool contains(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < sizes[0] && y < sizes[1] && z < sizes[2];
  }
  bool contains(const Index3& p) const { return contains(p.x, p.y, p.z); }

  /// Grid sizes and spacing agree (origin is ignored).
  bool same_grid(const GridGeometry& other) const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Euclidean distance in mm between two voxel positions.
double physical_distance(const Point3& a, const Point3& b, const Spacing3& spacing);
double physical_distance(const Index3& a, const Index3& b, const Spacing3& spacing);

inline Point3 to_point(const Index3& p) {
  return {static_cast<double>(p.x), static_cast<double>(p.y), static_cast<double>(p.z)};
}
Index3 round_to_index(const Point3& p);

/// Inclusive voxel box.
struct BoundingBox3D {
  Index3 min;
  Index3 max;

  Sizes3 extent() const { return {max.x - min.x + 1, max.y - min.y + 1, max.z - min.z + 1}; }
  std::size_t voxel_count() const {
    const auto e = extent();
    return static_cast<std::size_t>(e[0] * e[1] * e[2]);
  }
  bool contains(const Index3& p) const {
    return p.x >= min.x && p.y >= min.y && p.z >= min.z && p.x <= max.x && p.y <= max.y &&
           p.z <= max.z;
  }
  /// Grows by `pad` voxels per side, clipped to the grid.
  BoundingBox3D padded(std::int64_t pad, const GridGeometry& g) const;
  BoundingBox3D united(const BoundingBox3D& other) const;

  friend bool operator==(const BoundingBox3D&, const BoundingBox3D&) = default;
};

}  // namespace oarpost
