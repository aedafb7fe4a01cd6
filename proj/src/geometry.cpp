#include "oarpost/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oarpost/error.hpp"

namespace oarpost {

GridGeometry::GridGeometry(Sizes3 s, Spacing3 sp, Spacing3 o) : sizes(s), spacing(sp), origin(o) {}

void GridGeometry::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (sizes[a] < 1) throw Error("invalid geometry: size along axis " + std::to_string(a) + " < 1");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      throw Error("invalid geometry: spacing along axis " + std::to_string(a) + " not positive");
    }
  }
}

bool GridGeometry::same_grid(const GridGeometry& other) const {
  return sizes == other.sizes && spacing == other.spacing;
}

double physical_distance(const Point3& a, const Point3& b, const Spacing3& spacing) {
  const double dx = (a.x - b.x) * spacing[0];
  const double dy = (a.y - b.y) * spacing[1];
  const double dz = (a.z - b.z) * spacing[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double physical_distance(const Index3& a, const Index3& b, const Spacing3& spacing) {
  return physical_distance(to_point(a), to_point(b), spacing);
}

Index3 round_to_index(const Point3& p) {
  return {static_cast<std::int64_t>(std::llround(p.x)), static_cast<std::int64_t>(std::llround(p.y)),
          static_cast<std::int64_t>(std::llround(p.z))};
}

BoundingBox3D BoundingBox3D::padded(std::int64_t pad, const GridGeometry& g) const {
  BoundingBox3D out;
  out.min = {std::max<std::int64_t>(0, min.x - pad), std::max<std::int64_t>(0, min.y - pad),
             std::max<std::int64_t>(0, min.z - pad)};
  out.max = {std::min(g.nx() - 1, max.x + pad), std::min(g.ny() - 1, max.y + pad),
             std::min(g.nz() - 1, max.z + pad)};
  return out;
}

BoundingBox3D BoundingBox3D::united(const BoundingBox3D& other) const {
  return {{std::min(min.x, other.min.x), std::min(min.y, other.min.y), std::min(min.z, other.min.z)},
          {std::max(max.x, other.max.x), std::max(max.y, other.max.y), std::max(max.z, other.max.z)}};
}

}  // namespace oarpost
