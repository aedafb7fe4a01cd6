#include "oarpost/distance.hpp"

#include <algorithm>
#include <limits>

namespace oarpost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d[p] = min_q f[q] + w (p - q)^2 over finite f[q].
class LowerEnvelope {
public:
  void run(std::span<const double> f, double w, std::span<double> d) {
    const auto n = static_cast<std::int64_t>(f.size());
    v_.resize(f.size());
    z_.resize(f.size() + 1);
    std::int64_t k = -1;
    for (std::int64_t q = 0; q < n; ++q) {
      const double fq = f[q];
      if (fq == kInf) continue;
      if (k < 0) {
        k = 0;
        v_[0] = q;
        z_[0] = -kInf;
        z_[1] = kInf;
        continue;
      }
      double s = 0.0;
      while (true) {
        const auto vk = v_[k];
        s = ((fq + w * double(q) * double(q)) - (f[vk] + w * double(vk) * double(vk))) /
            (2.0 * w * double(q - vk));
        if (s <= z_[k]) {
          --k;  // z_[0] = -inf stops this at k = 0
        } else {
          break;
        }
      }
      ++k;
      v_[k] = q;
      z_[k] = s;
      z_[k + 1] = kInf;
    }
    if (k < 0) {
      std::fill(d.begin(), d.end(), kInf);
      return;
    }
    std::int64_t j = 0;
    for (std::int64_t p = 0; p < n; ++p) {
      while (z_[j + 1] < double(p)) ++j;
      const double diff = double(p - v_[j]);
      d[p] = w * diff * diff + f[v_[j]];
    }
  }

private:
  std::vector<std::int64_t> v_;
  std::vector<double> z_;
};

}  // namespace

std::vector<double> squared_distance_field(const BinaryMask& features, const Spacing3& spacing) {
  const auto& g = features.geometry();
  const auto nx = g.nx(), ny = g.ny(), nz = g.nz();
  std::vector<double> field(g.voxel_count());
  auto bits = features.bits();
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = bits[i] != 0 ? 0.0 : kInf;

  LowerEnvelope env;
  const auto longest = static_cast<std::size_t>(std::max({nx, ny, nz}));
  std::vector<double> line(longest), out(longest);

  const Sizes3 strides{1, nx, nx * ny};
  for (int axis = 0; axis < 3; ++axis) {
    const double w = spacing[axis] * spacing[axis];
    const auto n = g.sizes[axis];
    const auto stride = strides[axis];
    // Iterate over every line parallel to `axis`.
    for (std::int64_t z = 0; z < (axis == 2 ? 1 : nz); ++z) {
      for (std::int64_t y = 0; y < (axis == 1 ? 1 : ny); ++y) {
        for (std::int64_t x = 0; x < (axis == 0 ? 1 : nx); ++x) {
          const auto base = static_cast<std::int64_t>(g.index(x, y, z));
          bool any_finite = false;
          for (std::int64_t p = 0; p < n; ++p) {
            line[p] = field[static_cast<std::size_t>(base + p * stride)];
            any_finite = any_finite || line[p] != kInf;
          }
          if (!any_finite) continue;
          env.run(std::span<const double>(line.data(), static_cast<std::size_t>(n)), w,
                  std::span<double>(out.data(), static_cast<std::size_t>(n)));
          for (std::int64_t p = 0; p < n; ++p) field[static_cast<std::size_t>(base + p * stride)] = out[p];
        }
      }
    }
  }
  return field;
}

std::vector<double> squared_distance_field(const BinaryMask& features) {
  return squared_distance_field(features, features.geometry().spacing);
}

}  // namespace oarpost

#include <cmath>

#include "oarpost/measure.hpp"

namespace oarpost {

std::vector<double> nearest_feature_distances(const BinaryMask& from, const BinaryMask& to) {
  require_same_grid(from.geometry(), to.geometry());
  const auto from_box = bounding_box(from);
  if (!from_box) return {};
  const auto to_box = bounding_box(to);
  if (!to_box) return std::vector<double>(from.count(), std::numeric_limits<double>::infinity());
  const BoundingBox3D box = from_box->united(*to_box);
  const BinaryMask to_crop = crop(to, box);
  const BinaryMask from_crop = crop(from, box);
  const auto field = squared_distance_field(to_crop, from.geometry().spacing);
  std::vector<double> out;
  out.reserve(from.count());
  auto bits = from_crop.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0) out.push_back(std::sqrt(field[i]));
  }
  return out;
}

}  // namespace oarpost
