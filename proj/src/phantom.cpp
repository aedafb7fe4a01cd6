#include "oarpost/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oarpost/anatomy.hpp"
#include "oarpost/components.hpp"
#include "oarpost/distance.hpp"
#include "oarpost/error.hpp"

namespace oarpost {

GridGeometry default_phantom_geometry() {
  GridGeometry g;
  g.sizes = {160, 180, 100};
  g.spacing = {0.7, 0.7, 0.9};
  g.origin = {0.0, 0.0, 0.0};
  return g;
}

namespace {

constexpr double kPi = std::numbers::pi;

struct Layout {
  Point3 brain_center{56, 80, 55};
  Point3 brain_axes{46, 42, 32};
  Point3 brainstem{56, 85, 26};  // axis (x, y), z from
  double brainstem_radius = 9;
  double brainstem_top = 55;
  double eye_radius = 11.5;
  Point3 eyes[2] = {{27, 16, 35}, {85, 16, 35}};  // right, left
  double lens_radius = 2.5;
  double lens_offset = 8.5;
  double fat_thickness = 4.0;
  Point3 chiasm_center{56, 62, 35};
  double chiasm_radius = 2.2;
  Point3 chiasm_arm_front[2] = {{49, 55, 35}, {63, 55, 35}};
  Point3 chiasm_arm_back[2] = {{49, 69, 35}, {63, 69, 35}};
  Point3 pituitary{56, 64, 27};
  double pituitary_radius = 4;
  double hippocampus_radius = 3.5;
};

double sq(double v) { return v * v; }

// Distance from p to segment [a, b].
double segment_distance(const Point3& p, const Point3& a, const Point3& b) {
  const Point3 ab{b.x - a.x, b.y - a.y, b.z - a.z};
  const double len2 = sq(ab.x) + sq(ab.y) + sq(ab.z);
  double t = len2 > 0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y + (p.z - a.z) * ab.z) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::sqrt(sq(p.x - a.x - t * ab.x) + sq(p.y - a.y - t * ab.y) + sq(p.z - a.z - t * ab.z));
}

double distance(const Point3& a, const Point3& b) {
  return std::sqrt(sq(a.x - b.x) + sq(a.y - b.y) + sq(a.z - b.z));
}

// Sets every voxel within `radius` voxels of `c`.
void paint_voxel_ball(BinaryMask& m, const Index3& c, double radius) {
  const auto& g = m.geometry();
  const auto reach = static_cast<std::int64_t>(std::floor(radius));
  for (auto dz = -reach; dz <= reach; ++dz) {
    for (auto dy = -reach; dy <= reach; ++dy) {
      for (auto dx = -reach; dx <= reach; ++dx) {
        if (double(dx * dx + dy * dy + dz * dz) > radius * radius) continue;
        const Index3 p{c.x + dx, c.y + dy, c.z + dz};
        if (g.contains(p)) m.set(p);
      }
    }
  }
}

// Discrete monotone nerve path from `from` to `to` (mm), one voxel per y
// layer with |dx|, |dz| <= 1 between layers.
std::vector<Index3> nerve_path(const GridGeometry& g, const Point3& from, const Point3& to, double side) {
  const auto& s = g.spacing;
  const auto y0 = static_cast<std::int64_t>(std::lround(from.y / s[1]));
  const auto y1 = static_cast<std::int64_t>(std::lround(to.y / s[1]));
  std::vector<Index3> path;
  for (auto y = y0; y <= y1; ++y) {
    const double t = y1 == y0 ? 0.0 : double(y - y0) / double(y1 - y0);
    const double x_mm = from.x + t * (to.x - from.x) + side * 0.5 * std::sin(2 * kPi * t);
    const double z_mm = from.z + t * (to.z - from.z) + 2.0 * std::sin(kPi * t);
    Index3 p{std::lround(x_mm / s[0]), y, std::lround(z_mm / s[2])};
    if (!path.empty()) {
      const Index3& q = path.back();
      p.x = std::clamp(p.x, q.x - 1, q.x + 1);
      p.z = std::clamp(p.z, q.z - 1, q.z + 1);
    }
    path.push_back(p);
  }
  // Pull the end back onto the target when clamping lagged behind.
  const Index3 target{std::lround(to.x / s[0]), y1, std::lround(to.z / s[2])};
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const auto back = static_cast<std::int64_t>(it - path.rbegin());
    it->x = std::clamp(it->x, target.x - back, target.x + back);
    it->z = std::clamp(it->z, target.z - back, target.z + back);
  }
  for (auto& p : path) {
    p.x = std::clamp<std::int64_t>(p.x, 0, g.nx() - 1);
    p.y = std::clamp<std::int64_t>(p.y, 0, g.ny() - 1);
    p.z = std::clamp<std::int64_t>(p.z, 0, g.nz() - 1);
  }
  return path;
}

BinaryMask stabilise(const BinaryMask& m) {
  BinaryMask cur = m;
  for (;;) {
    BinaryMask next = prune_morphology(cur);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

}  // namespace

Phantom generate_phantom(std::uint64_t seed, const GridGeometry& geometry) {
  geometry.validate();
  if (geometry.nx() < 64 || geometry.ny() < 64 || geometry.nz() < 64) throw Error("geometry too small");
  const Layout L;
  const GridGeometry& g = geometry;
  const auto& s = g.spacing;
  auto mm = [&](const Index3& p) { return Point3{double(p.x) * s[0], double(p.y) * s[1], double(p.z) * s[2]}; };

  std::map<std::string, BinaryMask> m;
  for (const char* name : {"eye", "lens", "optic_nerve", "optic_chiasm", "pituitary", "hippocampus", "brainstem",
                           "brain"}) {
    m.emplace(name, BinaryMask(g));
  }
  BinaryMask fat(g);

  // Hippocampus arcs as chains of sphere centers.
  std::vector<Point3> hippo;
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? -1.0 : 1.0;
    for (int k = 0; k <= 20; ++k) {
      const double t = k / 20.0;
      hippo.push_back({L.brain_center.x + sign * (22 + 3 * std::sin(kPi * t)), 75 + 20 * t, 38 + 3 * t});
    }
  }
  const Point3 chiasm_mid{L.chiasm_center.x, L.chiasm_center.y, L.chiasm_center.z};

  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const Point3 p = mm(g.coords(i));
    const Point3& bc = L.brain_center;
    const double e = sq((p.x - bc.x) / L.brain_axes.x) + sq((p.y - bc.y) / L.brain_axes.y) +
                     sq((p.z - bc.z) / L.brain_axes.z);
    const bool brain = e <= 1.0;
    if (brain) m.at("brain").set(i);
    if (brain && p.z >= L.brainstem.z && p.z <= L.brainstem_top &&
        sq(p.x - L.brainstem.x) + sq(p.y - L.brainstem.y) <= sq(L.brainstem_radius)) {
      m.at("brainstem").set(i);
    }
    for (const auto& eye : L.eyes) {
      const double d = distance(p, eye);
      if (d <= L.eye_radius) m.at("eye").set(i);
      else if (d <= L.eye_radius + L.fat_thickness) fat.set(i);
      const Point3 lens{eye.x, eye.y - L.lens_offset, eye.z};
      if (distance(p, lens) <= L.lens_radius && d <= L.eye_radius) m.at("lens").set(i);
    }
    if (segment_distance(p, L.chiasm_arm_front[0], L.chiasm_arm_back[1]) <= L.chiasm_radius ||
        segment_distance(p, L.chiasm_arm_front[1], L.chiasm_arm_back[0]) <= L.chiasm_radius) {
      m.at("optic_chiasm").set(i);
    }
    if (distance(p, L.pituitary) <= L.pituitary_radius) m.at("pituitary").set(i);
    for (const auto& h : hippo) {
      if (distance(p, h) <= L.hippocampus_radius && brain) {
        m.at("hippocampus").set(i);
        break;
      }
    }
  }

  // Optic nerves: voxel-space balls along a monotone path from 1 mm inside
  // the posterior eye pole to 1.5 mm into the front chiasm arm.
  Phantom out;
  BinaryMask nerves(g);
  for (int side = 0; side < 2; ++side) {
    const Point3& eye = L.eyes[side];
    const Point3 from{eye.x, eye.y + L.eye_radius - 1.0, eye.z};
    const Point3& arm = L.chiasm_arm_front[side];
    const Point3 dir{chiasm_mid.x - arm.x, chiasm_mid.y - arm.y, 0};
    const double len = std::sqrt(sq(dir.x) + sq(dir.y));
    const Point3 to{arm.x + 1.5 * dir.x / len, arm.y + 1.5 * dir.y / len, arm.z};
    const auto path = nerve_path(g, from, to, side == 0 ? 1.0 : -1.0);
    BinaryMask tube(g);
    for (std::size_t k = 0; k < path.size(); ++k) {
      const double t = path.size() > 1 ? double(k) / double(path.size() - 1) : 0.0;
      paint_voxel_ball(tube, path[k], 3.4 - 0.5 * t);
      out.nerve_axes[side].push_back(to_point(path[k]));
    }
    nerves = mask_or(nerves, stabilise(tube));
  }
  m.at("optic_nerve") = nerves;

  // Intensities, later tissues painted over earlier ones.
  const PhantomIntensities I;
  Volume3D vol(g, I.background);
  auto values = vol.values();
  auto paint = [&](const BinaryMask& mask, float v) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask.test(i)) values[i] = v;
    }
  };
  paint(m.at("brain"), I.brain);
  paint(m.at("brainstem"), I.brainstem);
  paint(m.at("hippocampus"), I.hippocampus);
  paint(m.at("pituitary"), I.pituitary);
  paint(fat, I.fat);
  paint(m.at("eye"), I.eye);
  paint(m.at("lens"), I.lens);
  paint(m.at("optic_nerve"), I.nerve);
  paint(m.at("optic_chiasm"), I.chiasm);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0F, I.noise_sigma);
  for (auto& v : values) v += noise(rng);

  out.intensities = std::move(vol);
  out.truth = encode(m, ClassRegistry::default_registry());
  return out;
}

CorruptionSpec CorruptionSpec::standard() {
  CorruptionSpec spec;
  for (const char* name :
       {"eye", "lens", "optic_nerve", "optic_chiasm", "pituitary", "hippocampus", "brainstem", "brain"}) {
    spec.classes[name].jitter = 0.02;
  }
  spec.classes["brain"].hole_rate = 0.05;
  spec.classes["optic_nerve"].erase_span_fraction = 0.3;
  spec.classes["optic_nerve"].erase_span_count = 1;
  for (const char* name : {"brain", "eye", "lens", "optic_nerve", "optic_chiasm"}) spec.classes[name].distractors = 3;
  return spec;
}

void CorruptionSpec::validate() const {
  for (const auto& [name, c] : classes) {
    auto unit = [&](double v, const char* what) {
      if (!(v >= 0.0 && v <= 1.0)) throw Error("corruption " + name + "." + what + " must lie in [0, 1]");
    };
    unit(c.hole_rate, "hole_rate");
    unit(c.erase_span_fraction, "erase_span_fraction");
    unit(c.jitter, "jitter");
    if (c.erase_span_count < 0) throw Error("corruption " + name + ".erase_span_count must be non-negative");
    if (c.distractors < 0) throw Error("corruption " + name + ".distractors must be non-negative");
  }
}

const char* to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::Hole: return "hole";
    case CorruptionKind::EraseSpan: return "erase_span";
    case CorruptionKind::Distractor: return "distractor";
    case CorruptionKind::Jitter: return "jitter";
  }
  return "hole";
}

namespace {

const char* const kVisualClasses[] = {"eye", "lens", "optic_nerve", "optic_chiasm"};

// Voxels within `radius_mm` of `c`.
std::vector<std::size_t> ball_voxels(const GridGeometry& g, const Index3& c, double radius_mm) {
  std::vector<std::size_t> out;
  const auto& s = g.spacing;
  const Index3 reach{static_cast<std::int64_t>(radius_mm / s[0]), static_cast<std::int64_t>(radius_mm / s[1]),
                     static_cast<std::int64_t>(radius_mm / s[2])};
  for (auto dz = -reach.z; dz <= reach.z; ++dz) {
    for (auto dy = -reach.y; dy <= reach.y; ++dy) {
      for (auto dx = -reach.x; dx <= reach.x; ++dx) {
        const Index3 p{c.x + dx, c.y + dy, c.z + dz};
        if (!g.contains(p)) continue;
        if (sq(double(dx) * s[0]) + sq(double(dy) * s[1]) + sq(double(dz) * s[2]) <= radius_mm * radius_mm) {
          out.push_back(g.index(p));
        }
      }
    }
  }
  return out;
}

std::vector<double> distance_field_mm(const BinaryMask& m) {
  auto f = squared_distance_field(m);
  for (auto& v : f) v = std::sqrt(v);
  return f;
}

}  // namespace

CorruptedPrediction corrupt_prediction(const MultiLabelMask& truth, std::uint64_t seed, const CorruptionSpec& spec) {
  spec.validate();
  const auto& registry = truth.registry();
  for (const auto& [name, c] : spec.classes) registry.at(name);
  const GridGeometry& g = truth.geometry();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::map<std::string, BinaryMask> base;
  for (const auto& c : registry.classes()) base.emplace(c.name, decode(truth, c.name));
  std::array<std::map<std::string, BinaryMask>, 3> var{base, base, base};
  CorruptedPrediction out;

  // Distance to any visual-system structure, for distractor placement.
  BinaryMask visual(g);
  for (const char* name : kVisualClasses) {
    if (base.count(name)) visual = mask_or(visual, base.at(name));
  }
  std::vector<double> visual_distance;
  int rotation = 0;
  auto next_variants = [&] {
    std::array<bool, 3> v{true, true, true};
    v[static_cast<std::size_t>(rotation++ % 3)] = false;
    return v;
  };

  for (const auto& info : registry.classes()) {
    auto it = spec.classes.find(info.name);
    if (it == spec.classes.end() || !it->second.active()) continue;
    const ClassCorruption& cc = it->second;
    const std::string& name = info.name;
    const BinaryMask& gt = base.at(name);
    if (gt.empty()) continue;

    BinaryMask outside(g);
    for (std::size_t i = 0; i < gt.size(); ++i) outside.set(i, !gt.test(i));
    const auto depth = distance_field_mm(outside);  // inside distance to the boundary
    const double max_depth = *std::max_element(depth.begin(), depth.end());
    const double min_spacing = std::min({g.spacing[0], g.spacing[1], g.spacing[2]});
    const double max_spacing = std::max({g.spacing[0], g.spacing[1], g.spacing[2]});

    if (cc.hole_rate > 0) {
      std::vector<std::size_t> voxels;
      for (std::size_t i = 0; i < gt.size(); ++i) {
        if (gt.test(i)) voxels.push_back(i);
      }
      const auto target = static_cast<std::size_t>(std::ceil(cc.hole_rate * double(voxels.size())));
      BinaryMask carved(g);
      std::size_t erased = 0;
      std::uniform_int_distribution<std::size_t> pick(0, voxels.size() - 1);
      const double r_hi = std::min(5.0, 0.6 * max_depth);
      const double r_lo = std::max(min_spacing, 0.3 * max_depth) * (r_hi > 3.0 ? 1.0 : 0.5);
      for (int attempt = 0; attempt < 20000 && erased < target; ++attempt) {
        const double r = std::min(r_lo, r_hi) + unit(rng) * std::max(0.0, r_hi - r_lo);
        const std::size_t c = voxels[pick(rng)];
        if (depth[c] < r + 2 * max_spacing) continue;
        const auto which = next_variants();
        std::size_t n = 0;
        for (auto i : ball_voxels(g, g.coords(c), r)) {
          for (int k = 0; k < 3; ++k) {
            if (which[k]) var[k].at(name).set(i, false);
          }
          if (!carved.test(i)) {
            carved.set(i);
            ++n;
          }
        }
        erased += n;
        out.log.push_back({name, CorruptionKind::Hole, g.coords(c), r, n, which});
      }
    }

    if (cc.erase_span_fraction > 0 && cc.erase_span_count > 0) {
      const auto labeling = connected_components_3d(gt, 26);
      std::vector<std::uint32_t> ids(labeling.component_count());
      std::iota(ids.begin(), ids.end(), 1U);
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(cc.erase_span_count)));
      for (auto id : ids) {
        std::int64_t y0 = g.ny();
        std::int64_t y1 = -1;
        for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
          if (labeling.labels[i] != id) continue;
          const auto y = g.coords(i).y;
          y0 = std::min(y0, y);
          y1 = std::max(y1, y);
        }
        const std::int64_t extent = y1 - y0 + 1;
        const auto length = static_cast<std::int64_t>(std::lround(cc.erase_span_fraction * double(extent)));
        if (length == 0) continue;
        const std::int64_t start = y0 + (extent - length) / 2;
        std::size_t n = 0;
        for (std::size_t i = 0; i < labeling.labels.size(); ++i) {
          const auto y = g.coords(i).y;
          if (labeling.labels[i] != id || y < start || y >= start + length) continue;
          for (auto& v : var) v.at(name).set(i, false);
          ++n;
        }
        out.log.push_back({name, CorruptionKind::EraseSpan, Index3{0, start, 0},
                           double(length) * g.spacing[1], n, {true, true, true}});
      }
    }

    if (cc.distractors > 0) {
      if (visual_distance.empty()) visual_distance = distance_field_mm(visual);
      const auto own_distance = distance_field_mm(gt);
      const double r_max = std::clamp(0.4 * max_depth, 1.5, 5.0);
      std::uniform_int_distribution<std::size_t> pick(0, g.voxel_count() - 1);
      for (int d = 0; d < cc.distractors; ++d) {
        const double r = r_max * (0.8 + 0.2 * unit(rng));
        for (int attempt = 0; attempt < 20000; ++attempt) {
          const std::size_t c = pick(rng);
          const Index3 p = g.coords(c);
          const auto& s = g.spacing;
          if (double(p.x) * s[0] < r || double(g.nx() - 1 - p.x) * s[0] < r || double(p.y) * s[1] < r ||
              double(g.ny() - 1 - p.y) * s[1] < r || double(p.z) * s[2] < r || double(g.nz() - 1 - p.z) * s[2] < r) {
            continue;
          }
          if (own_distance[c] < r + 8.0 || visual_distance[c] < r + 10.0) continue;
          const auto which = next_variants();
          const auto ball = ball_voxels(g, p, r);
          for (auto i : ball) {
            for (int k = 0; k < 3; ++k) {
              if (which[k]) var[k].at(name).set(i);
            }
          }
          out.log.push_back({name, CorruptionKind::Distractor, p, r, ball.size(), which});
          break;
        }
      }
    }

    if (cc.jitter > 0) {
      std::vector<std::size_t> boundary;
      for (std::size_t i = 0; i < gt.size(); ++i) {
        const Index3 p = g.coords(i);
        const bool in = gt.test(i);
        const bool edge = gt.test_clipped(p.x - 1, p.y, p.z) != in || gt.test_clipped(p.x + 1, p.y, p.z) != in ||
                          gt.test_clipped(p.x, p.y - 1, p.z) != in || gt.test_clipped(p.x, p.y + 1, p.z) != in ||
                          gt.test_clipped(p.x, p.y, p.z - 1) != in || gt.test_clipped(p.x, p.y, p.z + 1) != in;
        if (edge && g.contains(p)) boundary.push_back(i);
      }
      for (int k = 0; k < 3; ++k) {
        std::size_t n = 0;
        BinaryMask& m = var[k].at(name);
        for (auto i : boundary) {
          if (unit(rng) < cc.jitter) {
            m.set(i, !m.test(i));
            ++n;
          }
        }
        std::array<bool, 3> which{};
        which[k] = true;
        out.log.push_back({name, CorruptionKind::Jitter, Index3{}, 0.0, n, which});
      }
    }
  }

  for (int k = 0; k < 3; ++k) out.variants[k] = encode(var[k], truth.registry_ptr());
  return out;
}

}  // namespace oarpost
