#include "oarpost/anatomy.hpp"

#include <cmath>
#include <functional>

#include "oarpost/components.hpp"
#include "oarpost/error.hpp"
#include "oarpost/measure.hpp"
#include "oarpost/parallel.hpp"

namespace oarpost {
namespace {

// (u, v, normal) axis indices of a plane family.
std::array<int, 3> plane_axes(PlaneFamily f) {
  switch (f) {
    case PlaneFamily::Axial: return {0, 1, 2};
    case PlaneFamily::Coronal: return {0, 2, 1};
    case PlaneFamily::Sagittal: return {1, 2, 0};
  }
  return {0, 1, 2};
}

}  // namespace

BinaryMask fill_holes_in_planes(const BinaryMask& mask, PlaneFamily family) {
  const auto& g = mask.geometry();
  const auto axes = plane_axes(family);
  const auto w = g.sizes[axes[0]];
  const auto h = g.sizes[axes[1]];
  const auto slices = g.sizes[axes[2]];
  BinaryMask out = mask;

  parallel_for(static_cast<std::size_t>(slices), [&](std::size_t s) {
    std::array<std::int64_t, 3> p{};
    p[axes[2]] = static_cast<std::int64_t>(s);
    auto voxel = [&](std::int64_t u, std::int64_t v) {
      p[axes[0]] = u;
      p[axes[1]] = v;
      return g.index(p[0], p[1], p[2]);
    };
    Plane2D background(w, h);
    for (std::int64_t v = 0; v < h; ++v) {
      for (std::int64_t u = 0; u < w; ++u) background.set(u, v, !mask.test(voxel(u, v)));
    }
    const auto cc = connected_components_2d(background, 4);
    if (cc.component_count() == 0) return;
    std::vector<std::uint8_t> touches_border(cc.sizes.size(), 0);
    for (std::int64_t u = 0; u < w; ++u) {
      touches_border[cc.labels[static_cast<std::size_t>(u)]] = 1;
      touches_border[cc.labels[static_cast<std::size_t>((h - 1) * w + u)]] = 1;
    }
    for (std::int64_t v = 0; v < h; ++v) {
      touches_border[cc.labels[static_cast<std::size_t>(v * w)]] = 1;
      touches_border[cc.labels[static_cast<std::size_t>(v * w + w - 1)]] = 1;
    }
    for (std::int64_t v = 0; v < h; ++v) {
      for (std::int64_t u = 0; u < w; ++u) {
        const auto l = cc.labels[static_cast<std::size_t>(v * w + u)];
        if (l != 0 && touches_border[l] == 0) out.set(voxel(u, v));
      }
    }
  });
  return out;
}

BinaryMask triplanar_hole_fill(const BinaryMask& mask) {
  BinaryMask out = fill_holes_in_planes(mask, PlaneFamily::Axial);
  out = fill_holes_in_planes(out, PlaneFamily::Coronal);
  return fill_holes_in_planes(out, PlaneFamily::Sagittal);
}

BinaryMask largest_component(const BinaryMask& mask) {
  const auto cc = connected_components_3d(mask, 26);
  if (cc.component_count() == 0) return BinaryMask(mask.geometry());
  return cc.component_mask(cc.largest());
}

BinaryMask filter_components_by_volume(const BinaryMask& mask, double min_volume_mm3) {
  if (min_volume_mm3 < 0) throw Error("minimum volume must be non-negative");
  const auto cc = connected_components_3d(mask, 26);
  const double voxel = mask.geometry().voxel_volume();
  std::vector<std::uint8_t> keep(cc.sizes.size(), 0);
  for (std::size_t id = 1; id < cc.sizes.size(); ++id) keep[id] = double(cc.sizes[id]) * voxel >= min_volume_mm3;
  BinaryMask out(mask.geometry());
  for (std::size_t i = 0; i < cc.labels.size(); ++i) {
    if (cc.labels[i] != 0 && keep[cc.labels[i]]) out.set(i);
  }
  return out;
}

BinaryMask constrain_inside(const BinaryMask& inner, const BinaryMask& outer) { return mask_and(inner, outer); }

SidedMasks split_left_right(const BinaryMask& mask, const BoundingBox3D& brain_box) {
  const auto cc = connected_components_3d(mask, 26);
  std::vector<double> sum_x(cc.sizes.size(), 0.0);
  const auto nx = mask.geometry().nx();
  for (std::size_t i = 0; i < cc.labels.size(); ++i) {
    if (cc.labels[i] != 0) sum_x[cc.labels[i]] += double(static_cast<std::int64_t>(i) % nx);
  }
  std::vector<std::uint8_t> is_right(cc.sizes.size(), 0);
  for (std::size_t id = 1; id < cc.sizes.size(); ++id) {
    const double bx = sum_x[id] / double(cc.sizes[id]);
    is_right[id] = std::abs(bx - double(brain_box.min.x)) <= std::abs(bx - double(brain_box.max.x));
  }
  SidedMasks out{BinaryMask(mask.geometry()), BinaryMask(mask.geometry())};
  for (std::size_t i = 0; i < cc.labels.size(); ++i) {
    const auto l = cc.labels[i];
    if (l == 0) continue;
    (is_right[l] ? out.right : out.left).set(i);
  }
  return out;
}

SidedMasks chiasm_sides(const BinaryMask& chiasm) {
  if (chiasm.empty()) throw Error("chiasm missing");
  const double bx = barycenter(chiasm).x;
  SidedMasks out{BinaryMask(chiasm.geometry()), BinaryMask(chiasm.geometry())};
  const auto nx = chiasm.geometry().nx();
  for (std::size_t i = 0; i < chiasm.size(); ++i) {
    if (!chiasm.test(i)) continue;
    const double x = double(static_cast<std::int64_t>(i) % nx);
    (x < bx ? out.right : out.left).set(i);
  }
  return out;
}

RegistryPtr sided_registry(const ClassRegistry& base) {
  std::vector<ClassInfo> classes;
  unsigned bit = 0;
  auto parent_name = [&](const std::string& p, const char* suffix) {
    const auto& info = base.at(p);
    return info.bilateral ? p + suffix : p;
  };
  for (const auto& c : base.classes()) {
    if (c.bilateral) {
      for (const char* suffix : {"_right", "_left"}) {
        ClassInfo s{c.name + suffix, bit++, false, {}};
        for (const auto& p : c.parents) s.parents.push_back(parent_name(p, suffix));
        classes.push_back(std::move(s));
      }
    } else {
      ClassInfo s{c.name, bit++, false, {}};
      // A unilateral class inside a bilateral one has no single sided parent.
      for (const auto& p : c.parents) {
        if (!base.at(p).bilateral) s.parents.push_back(p);
      }
      classes.push_back(std::move(s));
    }
    if (bit > kLabelWordBits) throw Error("sided registry needs more than 16 bits");
  }
  return std::make_shared<const ClassRegistry>(std::move(classes));
}

namespace {

std::vector<std::string> containment_order(const ClassRegistry& registry) {
  std::vector<std::string> order;
  std::map<std::string, bool> done;
  std::function<void(const ClassInfo&)> visit = [&](const ClassInfo& c) {
    if (done[c.name]) return;
    done[c.name] = true;
    for (const auto& p : c.parents) visit(registry.at(p));
    order.push_back(c.name);
  };
  for (const auto& c : registry.classes()) visit(c);
  return order;
}

}  // namespace

PostprocessResult postprocess_all(const MultiLabelMask& fused, const Volume3D& intensities,
                                  const PostprocessParams& params) {
  require_same_grid(fused.geometry(), intensities.geometry());
  params.nerve.validate();
  const auto& registry = fused.registry();
  const auto& names = params.names;
  if (!registry.contains(names.brain)) throw Error("brain prerequisite");

  std::map<std::string, BinaryMask> masks;
  for (const auto& c : registry.classes()) masks.emplace(c.name, decode(fused, c.name));

  BinaryMask& brain = masks.at(names.brain);
  brain = triplanar_hole_fill(largest_component(brain));
  const auto brain_box = bounding_box(brain);
  if (!brain_box) throw Error("brain prerequisite");

  if (registry.contains(names.eye)) {
    masks.at(names.eye) = filter_components_by_volume(masks.at(names.eye), params.min_eye_volume_mm3);
  }
  if (registry.contains(names.chiasm)) masks.at(names.chiasm) = largest_component(masks.at(names.chiasm));

  // Containment rules, parents first (lens in eye, brainstem in brain, ...).
  for (const auto& name : containment_order(registry)) {
    for (const auto& parent : registry.at(name).parents) {
      masks.at(name) = constrain_inside(masks.at(name), masks.at(parent));
    }
  }

  PostprocessResult result;
  std::map<std::string, SidedMasks> sided;
  for (const auto& c : registry.classes()) {
    if (c.bilateral && c.name != names.nerve) sided.emplace(c.name, split_left_right(masks.at(c.name), *brain_box));
  }

  if (registry.contains(names.nerve)) {
    const GridGeometry& g = fused.geometry();
    SidedMasks nerve_in = split_left_right(masks.at(names.nerve), *brain_box);
    SidedMasks nerve_out = nerve_in;
    const Side sides[2] = {Side::Right, Side::Left};
    std::array<NerveOutcome, 2> outcomes;
    std::array<std::optional<NerveLandmarks>, 2> landmarks;

    std::optional<SidedMasks> chiasm_half;
    if (registry.contains(names.chiasm) && !masks.at(names.chiasm).empty()) {
      chiasm_half = chiasm_sides(masks.at(names.chiasm));
    }
    const bool have_eyes = registry.contains(names.eye);
    for (int k = 0; k < 2; ++k) {
      outcomes[k].side = sides[k];
      if (!chiasm_half || !have_eyes) {
        outcomes[k].note = "missing prerequisite organ";
        continue;
      }
      try {
        landmarks[k] = detect_landmarks(nerve_in.get(sides[k]), sided.at(names.eye).get(sides[k]),
                                        chiasm_half->get(sides[k]), params.nerve.landmark_points, sides[k]);
        outcomes[k].landmarks = landmarks[k];
      } catch (const Error& e) {
        outcomes[k].note = e.what();
      }
    }

    std::array<bool, 2> run{landmarks[0].has_value(), landmarks[1].has_value()};
    if (run[0] && run[1] && too_close(*landmarks[1], *landmarks[0], g.spacing, params.nerve.close_landmark_mm)) {
      // One nerve only, from the shared chiasm landmark to the closer eye.
      const Point3 c = to_point(landmarks[0]->chiasm_end);
      std::array<double, 2> eye_distance{};
      for (int k = 0; k < 2; ++k) {
        eye_distance[k] = physical_distance(barycenter(sided.at(names.eye).get(sides[k])), c, g.spacing);
      }
      const int keep = eye_distance[0] <= eye_distance[1] ? 0 : 1;
      run[1 - keep] = false;
      outcomes[1 - keep].note = "chiasm landmarks too close; single nerve reconstructed";
    }

    parallel_for(2, [&](std::size_t k) {
      if (!run[k]) return;
      try {
        auto seg = reconstruct_nerve(nerve_in.get(sides[k]), intensities, *landmarks[k], params.nerve);
        nerve_out.get(sides[k]) = std::move(seg.mask);
        outcomes[k].reconstructed = true;
      } catch (const Error& e) {
        outcomes[k].note = e.what();
      }
    });
    masks.at(names.nerve) = mask_or(nerve_out.left, nerve_out.right);
    sided.emplace(names.nerve, std::move(nerve_out));
    result.nerves.assign(outcomes.begin(), outcomes.end());
  }

  result.labels = encode(masks, fused.registry_ptr());

  const auto sreg = sided_registry(registry);
  std::map<std::string, BinaryMask> sided_masks;
  for (const auto& c : registry.classes()) {
    if (c.bilateral) {
      sided_masks.emplace(c.name + "_right", sided.at(c.name).right);
      sided_masks.emplace(c.name + "_left", sided.at(c.name).left);
    } else {
      sided_masks.emplace(c.name, masks.at(c.name));
    }
  }
  result.sided = encode(sided_masks, sreg);
  return result;
}

}  // namespace oarpost
