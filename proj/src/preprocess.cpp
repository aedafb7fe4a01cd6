#include "oarpost/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "oarpost/error.hpp"
#include "oarpost/simd.hpp"

namespace oarpost {
namespace {

GridGeometry resampled_geometry(const GridGeometry& g, const Spacing3& target) {
  for (double s : target) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error("non-positive target spacing");
  }
  GridGeometry out = g;
  out.spacing = target;
  for (int a = 0; a < 3; ++a) {
    const double extent = double(g.sizes[a]) * g.spacing[a];
    out.sizes[a] = std::max<std::int64_t>(1, std::llround(extent / target[a]));
  }
  return out;
}

// Continuous input index of output voxel i, origins aligned. Near-integer
// positions snap so that equal spacings copy voxels exactly.
double source_coordinate(std::int64_t i, double out_spacing, double in_spacing) {
  const double u = double(i) * (out_spacing / in_spacing);
  const double r = std::round(u);
  return std::abs(u - r) < 1e-9 ? r : u;
}

struct Lerp1 {
  std::int64_t i0, i1;
  double t;
};

Lerp1 lerp_weights(double u, std::int64_t n) {
  u = std::clamp(u, 0.0, double(n - 1));
  const auto i0 = static_cast<std::int64_t>(std::floor(u));
  const auto i1 = std::min(i0 + 1, n - 1);
  return {i0, i1, u - double(i0)};
}

}  // namespace

Volume3D resample(const Volume3D& volume, const Spacing3& target_spacing, Interpolation mode) {
  const auto& g = volume.geometry();
  const GridGeometry og = resampled_geometry(g, target_spacing);
  Volume3D out(og);

  std::array<std::vector<Lerp1>, 3> w;
  for (int a = 0; a < 3; ++a) {
    w[a].resize(static_cast<std::size_t>(og.sizes[a]));
    for (std::int64_t i = 0; i < og.sizes[a]; ++i) {
      const double u = source_coordinate(i, og.spacing[a], g.spacing[a]);
      if (mode == Interpolation::Nearest) {
        const auto r = std::clamp<std::int64_t>(std::llround(u), 0, g.sizes[a] - 1);
        w[a][i] = {r, r, 0.0};
      } else {
        w[a][i] = lerp_weights(u, g.sizes[a]);
      }
    }
  }

  std::size_t o = 0;
  for (std::int64_t z = 0; z < og.nz(); ++z) {
    const auto& wz = w[2][z];
    for (std::int64_t y = 0; y < og.ny(); ++y) {
      const auto& wy = w[1][y];
      for (std::int64_t x = 0; x < og.nx(); ++x, ++o) {
        const auto& wx = w[0][x];
        if (mode == Interpolation::Nearest) {
          out[o] = volume.at(wx.i0, wy.i0, wz.i0);
          continue;
        }
        auto plane = [&](std::int64_t zz) {
          const double a = (1 - wx.t) * volume.at(wx.i0, wy.i0, zz) + wx.t * volume.at(wx.i1, wy.i0, zz);
          const double b = (1 - wx.t) * volume.at(wx.i0, wy.i1, zz) + wx.t * volume.at(wx.i1, wy.i1, zz);
          return (1 - wy.t) * a + wy.t * b;
        };
        out[o] = static_cast<float>((1 - wz.t) * plane(wz.i0) + wz.t * plane(wz.i1));
      }
    }
  }
  return out;
}

BinaryMask resample(const BinaryMask& mask, const Spacing3& target_spacing) {
  const auto& g = mask.geometry();
  const GridGeometry og = resampled_geometry(g, target_spacing);
  std::array<std::vector<std::int64_t>, 3> src;
  for (int a = 0; a < 3; ++a) {
    for (std::int64_t i = 0; i < og.sizes[a]; ++i) {
      const double u = source_coordinate(i, og.spacing[a], g.spacing[a]);
      src[a].push_back(std::clamp<std::int64_t>(std::llround(u), 0, g.sizes[a] - 1));
    }
  }
  BinaryMask out(og);
  std::size_t o = 0;
  for (std::int64_t z = 0; z < og.nz(); ++z) {
    for (std::int64_t y = 0; y < og.ny(); ++y) {
      for (std::int64_t x = 0; x < og.nx(); ++x, ++o) out.set(o, mask.test(src[0][x], src[1][y], src[2][z]));
    }
  }
  return out;
}

namespace {

// Input index = output index + offset per axis.
std::array<std::int64_t, 3> crop_offsets(const Sizes3& in, const Sizes3& out) {
  const auto centered = [](std::int64_t n_in, std::int64_t n_out) {
    const auto d = n_in - n_out;
    return d >= 0 ? d / 2 : -((-d + 1) / 2);
  };
  return {centered(in[0], out[0]), centered(in[1], out[1]), in[2] - out[2]};
}

GridGeometry crop_geometry(const GridGeometry& g, const Sizes3& target, const std::array<std::int64_t, 3>& off) {
  GridGeometry out = g;
  out.sizes = target;
  out.validate();
  for (int a = 0; a < 3; ++a) out.origin[a] = g.origin[a] + double(off[a]) * g.spacing[a];
  return out;
}

template <class Out, class In, class Fill>
void copy_window(const GridGeometry& g, const GridGeometry& og, const std::array<std::int64_t, 3>& off,
                 const In& read, Out& write, Fill fill) {
  std::size_t o = 0;
  for (std::int64_t z = 0; z < og.nz(); ++z) {
    for (std::int64_t y = 0; y < og.ny(); ++y) {
      for (std::int64_t x = 0; x < og.nx(); ++x, ++o) {
        const auto sx = x + off[0], sy = y + off[1], sz = z + off[2];
        write(o, g.contains(sx, sy, sz) ? read(g.index(sx, sy, sz)) : fill);
      }
    }
  }
}

}  // namespace

Volume3D crop_or_pad(const Volume3D& volume, const Sizes3& target_sizes, float fill) {
  const auto& g = volume.geometry();
  const auto off = crop_offsets(g.sizes, target_sizes);
  Volume3D out(crop_geometry(g, target_sizes, off));
  auto read = [&](std::size_t i) { return volume[i]; };
  auto write = [&](std::size_t i, float v) { out[i] = v; };
  copy_window(g, out.geometry(), off, read, write, fill);
  return out;
}

BinaryMask crop_or_pad(const BinaryMask& mask, const Sizes3& target_sizes) {
  const auto& g = mask.geometry();
  const auto off = crop_offsets(g.sizes, target_sizes);
  BinaryMask out(crop_geometry(g, target_sizes, off));
  auto read = [&](std::size_t i) { return mask.test(i); };
  auto write = [&](std::size_t i, bool v) { out.set(i, v); };
  copy_window(g, out.geometry(), off, read, write, false);
  return out;
}

Volume3D normalize_intensity(const Volume3D& volume, double scale, std::optional<double> percentile) {
  if (volume.size() == 0) throw Error("degenerate intensity range");
  double reference = 0.0;
  if (percentile) {
    if (!(*percentile > 0.0 && *percentile <= 1.0)) throw Error("percentile must lie in (0, 1]");
    std::vector<float> sorted(volume.values().begin(), volume.values().end());
    const auto rank = static_cast<std::size_t>(std::ceil(*percentile * double(sorted.size())));
    const auto k = std::clamp<std::size_t>(rank, 1, sorted.size()) - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
    reference = sorted[k];
  } else {
    reference = simd::max_value(volume.values());
  }
  if (!(reference > 0.0)) throw Error("degenerate intensity range");
  Volume3D out(volume.geometry());
  simd::scale(volume.values(), scale, reference, out.values());
  // Voxels at the reference map to the constant exactly.
  const auto in = volume.values();
  auto o = out.values();
  const auto ref = static_cast<float>(reference);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == ref) o[i] = static_cast<float>(scale);
  }
  return out;
}

}  // namespace oarpost
