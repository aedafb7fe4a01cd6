#include "oarpost/components.hpp"

#include <array>
#include <numeric>
#include <string>

#include "oarpost/error.hpp"

namespace oarpost {
namespace {

struct Offset {
  std::int64_t dx, dy, dz;
};

// Neighbours already visited in raster order (x fastest).
std::vector<Offset> backward_offsets(int connectivity) {
  const int max_l1 = connectivity == 6 ? 1 : connectivity == 18 ? 2 : 3;
  std::vector<Offset> out;
  for (std::int64_t dz = -1; dz <= 0; ++dz) {
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const bool backward = dz < 0 || (dz == 0 && dy < 0) || (dz == 0 && dy == 0 && dx < 0);
        const auto l1 = std::abs(dx) + std::abs(dy) + std::abs(dz);
        if (backward && l1 <= max_l1) out.push_back({dx, dy, dz});
      }
    }
  }
  return out;
}

class UnionFind {
public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t a) {
    std::uint32_t root = a;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[a] != root) {
      const auto next = parent_[a];
      parent_[a] = root;
      a = next;
    }
    return root;
  }
  // The smaller label stays root, so every root is its set's earliest label.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }
  std::size_t size() const { return parent_.size(); }

private:
  std::vector<std::uint32_t> parent_;
};

// Two-pass labeling with union-find over an (nx, ny, nz) byte grid.
void label_grid(const Sizes3& sizes, std::span<const std::uint8_t> bits, int connectivity,
                std::vector<std::uint32_t>& labels, std::vector<std::size_t>& sizes_out) {
  const auto nx = sizes[0], ny = sizes[1], nz = sizes[2];
  const auto offsets = backward_offsets(connectivity);
  labels.assign(bits.size(), 0);

  UnionFind uf;
  uf.make();  // provisional label 0 = background
  std::size_t i = 0;
  for (std::int64_t z = 0; z < nz; ++z) {
    for (std::int64_t y = 0; y < ny; ++y) {
      for (std::int64_t x = 0; x < nx; ++x, ++i) {
        if (bits[i] == 0) continue;
        std::uint32_t current = 0;
        for (const auto& o : offsets) {
          const auto xx = x + o.dx, yy = y + o.dy, zz = z + o.dz;
          if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny) continue;
          const auto n = static_cast<std::size_t>((zz * ny + yy) * nx + xx);
          const auto l = labels[n];
          if (l == 0) continue;
          if (current == 0) current = l;
          else uf.unite(current, l);
        }
        labels[i] = current != 0 ? current : uf.make();
      }
    }
  }

  std::vector<std::uint32_t> final_id(uf.size(), 0);
  std::uint32_t next = 0;
  for (std::uint32_t l = 1; l < uf.size(); ++l) {
    if (uf.find(l) == l) final_id[l] = ++next;
  }
  sizes_out.assign(static_cast<std::size_t>(next) + 1, 0);
  for (auto& l : labels) {
    if (l == 0) continue;
    l = final_id[uf.find(l)];
    ++sizes_out[l];
  }
}

}  // namespace

std::uint32_t ComponentLabeling::largest() const {
  std::uint32_t best = 0;
  std::size_t best_size = 0;
  for (std::size_t id = 1; id < sizes.size(); ++id) {
    if (sizes[id] > best_size) {
      best_size = sizes[id];
      best = static_cast<std::uint32_t>(id);
    }
  }
  return best;
}

BinaryMask ComponentLabeling::component_mask(std::uint32_t id) const {
  BinaryMask out(geometry);
  auto bits = out.bits();
  for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == id && id != 0 ? 1 : 0;
  return out;
}

ComponentLabeling connected_components_3d(const BinaryMask& mask, int connectivity) {
  if (connectivity != 6 && connectivity != 18 && connectivity != 26) {
    throw Error("invalid 3D connectivity: " + std::to_string(connectivity));
  }
  ComponentLabeling out;
  out.geometry = mask.geometry();
  out.connectivity = connectivity;
  label_grid(mask.geometry().sizes, mask.bits(), connectivity, out.labels, out.sizes);
  return out;
}

ComponentLabeling2D connected_components_2d(const Plane2D& plane, int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw Error("invalid 2D connectivity: " + std::to_string(connectivity));
  }
  if (plane.bits.size() != static_cast<std::size_t>(plane.width * plane.height)) {
    throw Error("payload size mismatch");
  }
  ComponentLabeling2D out;
  out.width = plane.width;
  out.height = plane.height;
  out.connectivity = connectivity;
  // A single slice: 6-connectivity is 4 in-plane, 26 is 8 in-plane.
  label_grid({plane.width, plane.height, 1}, plane.bits, connectivity == 4 ? 6 : 26, out.labels,
             out.sizes);
  return out;
}

}  // namespace oarpost
