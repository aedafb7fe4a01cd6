#include "oarpost/measure.hpp"

#include <algorithm>

#include "oarpost/error.hpp"

namespace oarpost {

std::optional<BoundingBox3D> bounding_box(const BinaryMask& mask) {
  const auto& g = mask.geometry();
  auto bits = mask.bits();
  bool found = false;
  BoundingBox3D box;
  std::size_t i = 0;
  for (std::int64_t z = 0; z < g.nz(); ++z) {
    for (std::int64_t y = 0; y < g.ny(); ++y) {
      for (std::int64_t x = 0; x < g.nx(); ++x, ++i) {
        if (bits[i] == 0) continue;
        if (!found) {
          box.min = box.max = {x, y, z};
          found = true;
          continue;
        }
        box.min = {std::min(box.min.x, x), std::min(box.min.y, y), std::min(box.min.z, z)};
        box.max = {std::max(box.max.x, x), std::max(box.max.y, y), std::max(box.max.z, z)};
      }
    }
  }
  if (!found) return std::nullopt;
  return box;
}

Point3 barycenter(const BinaryMask& mask) {
  const auto& g = mask.geometry();
  auto bits = mask.bits();
  double sx = 0, sy = 0, sz = 0;
  std::size_t n = 0;
  std::size_t i = 0;
  for (std::int64_t z = 0; z < g.nz(); ++z) {
    for (std::int64_t y = 0; y < g.ny(); ++y) {
      for (std::int64_t x = 0; x < g.nx(); ++x, ++i) {
        if (bits[i] == 0) continue;
        sx += double(x);
        sy += double(y);
        sz += double(z);
        ++n;
      }
    }
  }
  if (n == 0) throw Error("empty mask");
  return {sx / double(n), sy / double(n), sz / double(n)};
}

double physical_volume(const BinaryMask& mask) {
  return double(mask.count()) * mask.geometry().voxel_volume();
}

namespace {

GridGeometry cropped_geometry(const GridGeometry& g, const BoundingBox3D& box) {
  if (!g.contains(box.min) || !g.contains(box.max) || box.min.x > box.max.x ||
      box.min.y > box.max.y || box.min.z > box.max.z) {
    throw Error("crop box outside grid");
  }
  GridGeometry out = g;
  out.sizes = box.extent();
  out.origin = {g.origin[0] + double(box.min.x) * g.spacing[0],
                g.origin[1] + double(box.min.y) * g.spacing[1],
                g.origin[2] + double(box.min.z) * g.spacing[2]};
  return out;
}

template <class T, class Src, class Dst>
void copy_box(const GridGeometry& src_g, const Src& src, const BoundingBox3D& box, Dst& dst) {
  const auto e = box.extent();
  std::size_t o = 0;
  for (std::int64_t z = 0; z < e[2]; ++z) {
    for (std::int64_t y = 0; y < e[1]; ++y) {
      const auto row = src_g.index(box.min.x, box.min.y + y, box.min.z + z);
      for (std::int64_t x = 0; x < e[0]; ++x, ++o) dst[o] = static_cast<T>(src[row + x]);
    }
  }
}

}  // namespace

BinaryMask crop(const BinaryMask& mask, const BoundingBox3D& box) {
  BinaryMask out(cropped_geometry(mask.geometry(), box));
  auto dst = out.bits();
  copy_box<std::uint8_t>(mask.geometry(), mask.bits(), box, dst);
  return out;
}

Volume3D crop(const Volume3D& volume, const BoundingBox3D& box) {
  Volume3D out(cropped_geometry(volume.geometry(), box));
  auto dst = out.values();
  copy_box<float>(volume.geometry(), volume.values(), box, dst);
  return out;
}

}  // namespace oarpost
