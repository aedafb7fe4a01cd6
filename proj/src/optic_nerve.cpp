#include "oarpost/optic_nerve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "oarpost/anatomy.hpp"
#include "oarpost/components.hpp"
#include "oarpost/distance.hpp"
#include "oarpost/error.hpp"
#include "oarpost/measure.hpp"
#include "oarpost/simd.hpp"

namespace oarpost {

void NerveParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("invalid nerve parameter: ") + what);
  };
  require(landmark_points >= 1, "landmark_points");
  require(label_penalty > 0, "label_penalty");
  require(distance_weight >= 0, "distance_weight");
  require(radius_chiasm >= 1, "radius_chiasm");
  require(radius_eye >= radius_chiasm, "radius_eye");
  require(inner_radius > 0, "inner_radius");
  require(fat_quantile > 0 && fat_quantile < 1, "fat_quantile");
  require(fat_factor > 0 && fat_factor <= 1, "fat_factor");
  require(fat_box_halfwidth >= 0, "fat_box_halfwidth");
  require(close_landmark_mm >= 0, "close_landmark_mm");
}

const char* to_string(Side side) { return side == Side::Left ? "left" : "right"; }

namespace {

// Rounded barycenter of the `count` voxels of `mask` with the smallest
// distances, plus every voxel tied with the last of them.
Index3 nearest_barycenter(const BinaryMask& mask, const std::vector<double>& distances, int count) {
  std::vector<double> sorted = distances;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(count), sorted.size());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  const double cutoff = sorted[k - 1];
  const auto& g = mask.geometry();
  Point3 sum{0, 0, 0};
  std::size_t n = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.test(i)) continue;
    if (distances[j++] > cutoff) continue;
    const Index3 p = g.coords(i);
    sum.x += double(p.x);
    sum.y += double(p.y);
    sum.z += double(p.z);
    ++n;
  }
  return round_to_index({sum.x / double(n), sum.y / double(n), sum.z / double(n)});
}

Index3 nearest_voxel(const BinaryMask& mask, const Point3& target) {
  const auto& g = mask.geometry();
  double best = std::numeric_limits<double>::infinity();
  Index3 best_p{};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.test(i)) continue;
    const Index3 p = g.coords(i);
    const double d = physical_distance(to_point(p), target, g.spacing);
    if (d < best) {
      best = d;
      best_p = p;
    }
  }
  return best_p;
}

BinaryMask surface(const BinaryMask& mask) {
  BinaryMask out(mask.geometry());
  const auto& g = mask.geometry();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.test(i)) continue;
    const Index3 p = g.coords(i);
    const bool interior = mask.test_clipped(p.x - 1, p.y, p.z) && mask.test_clipped(p.x + 1, p.y, p.z) &&
                          mask.test_clipped(p.x, p.y - 1, p.z) && mask.test_clipped(p.x, p.y + 1, p.z) &&
                          mask.test_clipped(p.x, p.y, p.z - 1) && mask.test_clipped(p.x, p.y, p.z + 1);
    if (!interior) out.set(i);
  }
  return out;
}

}  // namespace

NerveLandmarks detect_landmarks(const BinaryMask& nerve_prediction, const BinaryMask& eye,
                                const BinaryMask& chiasm_side, int landmark_points, Side side) {
  require_same_grid(nerve_prediction.geometry(), eye.geometry());
  require_same_grid(nerve_prediction.geometry(), chiasm_side.geometry());
  if (landmark_points < 1) throw Error("landmark_points must be positive");
  if (eye.empty() || chiasm_side.empty()) throw Error("missing prerequisite organ");
  NerveLandmarks out;
  out.side = side;
  if (nerve_prediction.empty()) {
    out.eye_end = nearest_voxel(surface(eye), barycenter(chiasm_side));
    out.chiasm_end = nearest_voxel(chiasm_side, barycenter(eye));
    return out;
  }
  out.eye_end = nearest_barycenter(nerve_prediction, nearest_feature_distances(nerve_prediction, eye),
                                   landmark_points);
  out.chiasm_end = nearest_barycenter(chiasm_side, nearest_feature_distances(chiasm_side, nerve_prediction),
                                      landmark_points);
  return out;
}

bool too_close(const NerveLandmarks& left, const NerveLandmarks& right, const Spacing3& spacing,
               double threshold_mm) {
  return physical_distance(left.chiasm_end, right.chiasm_end, spacing) < threshold_mm;
}

std::optional<double> fat_threshold(const Volume3D& intensities, const Index3& eye_end,
                                    const NerveParams& params) {
  const auto& g = intensities.geometry();
  const std::int64_t h = params.fat_box_halfwidth;
  const Index3 lo{std::max<std::int64_t>(eye_end.x - h, 0), std::max<std::int64_t>(eye_end.y - h, 0),
                  std::max<std::int64_t>(eye_end.z - h, 0)};
  const Index3 hi{std::min(eye_end.x + h, g.nx() - 1), std::min(eye_end.y + h, g.ny() - 1),
                  std::min(eye_end.z + h, g.nz() - 1)};
  if (lo.x > hi.x || lo.y > hi.y || lo.z > hi.z) return std::nullopt;
  std::vector<float> box;
  for (auto z = lo.z; z <= hi.z; ++z) {
    for (auto y = lo.y; y <= hi.y; ++y) {
      for (auto x = lo.x; x <= hi.x; ++x) box.push_back(intensities.at(x, y, z));
    }
  }
  std::sort(box.begin(), box.end());
  const auto rank = static_cast<std::size_t>(std::ceil(params.fat_quantile * double(box.size())));
  const double q = box[std::clamp<std::size_t>(rank, 1, box.size()) - 1];
  const double threshold = params.fat_factor * q;
  if (threshold <= double(box.front())) return std::nullopt;
  return threshold;
}

BinaryMask refine_by_intensity(const BinaryMask& nerve_prediction, const Volume3D& intensities,
                               const Index3& eye_end, const NerveParams& params) {
  require_same_grid(nerve_prediction.geometry(), intensities.geometry());
  const auto threshold = fat_threshold(intensities, eye_end, params);
  if (!threshold) return nerve_prediction;
  BinaryMask out = nerve_prediction;
  auto values = intensities.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.test(i) && double(values[i]) > *threshold) out.set(i, false);
  }
  return out;
}

NodeCost node_cost(bool positive, double d_border, double d_target_mm, double radius,
                   const NerveParams& params) {
  NodeCost c;
  if (positive) {
    c.c_border = radius - std::clamp(d_border, 0.0, radius);
  } else {
    c.c_label = params.label_penalty;
  }
  c.c_distance = params.distance_weight * d_target_mm;
  c.total = c.c_label + c.c_border + c.c_distance;
  return c;
}

double interpolated_radius(const NerveLandmarks& landmarks, std::int64_t y, const NerveParams& params) {
  const auto y0 = landmarks.eye_end.y;
  const auto y1 = landmarks.chiasm_end.y;
  double t = 0.0;
  if (y1 != y0) t = std::clamp(double(y - y0) / double(y1 - y0), 0.0, 1.0);
  return params.radius_eye + t * (params.radius_chiasm - params.radius_eye);
}

double LayeredCostGrid::at(const Index3& p) const {
  const auto e = roi.extent();
  return cost[static_cast<std::size_t>(((p.z - roi.min.z) * e[1] + (p.y - roi.min.y)) * e[0] + (p.x - roi.min.x))];
}

CenterlinePath shortest_monotone_path(const LayeredCostGrid& grid, const Index3& start, const Index3& target) {
  const BoundingBox3D& roi = grid.roi;
  if (grid.cost.size() != roi.voxel_count()) throw Error("cost grid size mismatch");
  if (!roi.contains(start) || !roi.contains(target)) throw Error("landmarks not connectable");
  const std::int64_t dy = target.y - start.y;
  const std::int64_t steps = std::abs(dy);
  if (std::abs(target.x - start.x) > steps || std::abs(target.z - start.z) > steps) {
    throw Error("landmarks not connectable");
  }
  if (steps == 0) return {{start}, 0.0};
  const std::int64_t s = dy > 0 ? 1 : -1;

  const auto e = roi.extent();
  auto index_of = [&](const Index3& p) {
    return static_cast<std::size_t>(((p.z - roi.min.z) * e[1] + (p.y - roi.min.y)) * e[0] + (p.x - roi.min.x));
  };
  auto point_of = [&](std::size_t i) {
    const auto ii = static_cast<std::int64_t>(i);
    return Index3{roi.min.x + ii % e[0], roi.min.y + (ii / e[0]) % e[1], roi.min.z + ii / (e[0] * e[1])};
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(grid.cost.size(), inf);
  std::vector<std::size_t> prev(grid.cost.size(), none);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  const std::size_t source = index_of(start);
  const std::size_t sink = index_of(target);
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    if (u == sink) break;
    const Index3 p = point_of(u);
    if (p.y == target.y) continue;
    const std::int64_t remaining = std::abs(target.y - p.y) - 1;
    for (std::int64_t dz = -1; dz <= 1; ++dz) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const Index3 q{p.x + dx, p.y + s, p.z + dz};
        if (!roi.contains(q)) continue;
        if (std::abs(target.x - q.x) > remaining || std::abs(target.z - q.z) > remaining) continue;
        const std::size_t v = index_of(q);
        const double nd = d + grid.cost[v];
        if (nd < dist[v]) {
          dist[v] = nd;
          prev[v] = u;
          queue.push({nd, v});
        }
      }
    }
  }
  if (dist[sink] == inf) throw Error("landmarks not connectable");
  CenterlinePath path;
  path.total_cost = dist[sink];
  for (std::size_t v = sink; v != none; v = prev[v]) path.points.push_back(point_of(v));
  std::reverse(path.points.begin(), path.points.end());
  return path;
}

LayeredCostGrid build_cost_grid(const BinaryMask& refined, const NerveLandmarks& landmarks,
                                const NerveParams& params) {
  params.validate();
  const auto& g = refined.geometry();
  if (!g.contains(landmarks.eye_end) || !g.contains(landmarks.chiasm_end)) {
    throw Error("landmarks not connectable");
  }
  const auto& a = landmarks.eye_end;
  const auto& b = landmarks.chiasm_end;
  const auto pad = static_cast<std::int64_t>(std::ceil(std::max(params.radius_eye, params.radius_chiasm)));
  LayeredCostGrid grid;
  grid.roi = {{std::max<std::int64_t>(std::min(a.x, b.x) - pad, 0), std::min(a.y, b.y),
               std::max<std::int64_t>(std::min(a.z, b.z) - pad, 0)},
              {std::min(std::max(a.x, b.x) + pad, g.nx() - 1), std::max(a.y, b.y),
               std::min(std::max(a.z, b.z) + pad, g.nz() - 1)}};

  // Exact distance (voxel units) to the nearest negative voxel; anything
  // beyond the largest radius is capped anyway.
  const BoundingBox3D region = grid.roi.padded(pad + 1, g);
  const BinaryMask local = crop(refined, region);
  BinaryMask negatives(local.geometry());
  for (std::size_t i = 0; i < local.size(); ++i) negatives.set(i, !local.test(i));
  const auto border_sq = squared_distance_field(negatives, Spacing3{1.0, 1.0, 1.0});
  const auto& lg = local.geometry();

  grid.cost.resize(grid.roi.voxel_count());
  std::size_t k = 0;
  for (auto z = grid.roi.min.z; z <= grid.roi.max.z; ++z) {
    for (auto y = grid.roi.min.y; y <= grid.roi.max.y; ++y) {
      const double radius = interpolated_radius(landmarks, y, params);
      for (auto x = grid.roi.min.x; x <= grid.roi.max.x; ++x, ++k) {
        const std::size_t li = lg.index(x - region.min.x, y - region.min.y, z - region.min.z);
        const bool positive = local.test(li);
        const double d_target = physical_distance(Index3{x, y, z}, b, g.spacing);
        grid.cost[k] = node_cost(positive, std::sqrt(border_sq[li]), d_target, radius, params).total;
      }
    }
  }
  return grid;
}

CenterlinePath shortest_centerline(const BinaryMask& refined, const NerveLandmarks& landmarks,
                                   const NerveParams& params) {
  return shortest_monotone_path(build_cost_grid(refined, landmarks, params), landmarks.eye_end,
                                landmarks.chiasm_end);
}

BinaryMask reconstruct_tube(const CenterlinePath& centerline, const BinaryMask& refined,
                            const NerveLandmarks& landmarks, const NerveParams& params) {
  const auto& g = refined.geometry();
  BinaryMask out(g);
  const double r1 = params.inner_radius;
  for (const auto& c : centerline.points) {
    const double r2 = interpolated_radius(landmarks, c.y, params);
    const auto reach = static_cast<std::int64_t>(std::floor(std::max(r1, r2)));
    for (auto dz = -reach; dz <= reach; ++dz) {
      for (auto dy = -reach; dy <= reach; ++dy) {
        for (auto dx = -reach; dx <= reach; ++dx) {
          const Index3 p{c.x + dx, c.y + dy, c.z + dz};
          if (!g.contains(p)) continue;
          const double d2 = double(dx * dx + dy * dy + dz * dz);
          const std::size_t i = g.index(p);
          if (d2 <= r1 * r1 || (d2 <= r2 * r2 && refined.test(i))) out.set(i);
        }
      }
    }
  }
  return out;
}

BinaryMask open_line(const BinaryMask& mask, int axis) {
  if (axis < 0 || axis > 2) throw Error("axis must be 0, 1 or 2");
  const auto& g = mask.geometry();
  const auto n = static_cast<std::size_t>(g.sizes[axis]);
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(g.sizes[a]);
  const std::size_t block = stride * n;
  const std::size_t blocks = mask.size() / block;
  auto m = mask.bits();
  std::vector<std::uint8_t> eroded(mask.size(), 0);
  BinaryMask out(g);
  auto d = out.bits();
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t o = b * block;
    const std::size_t body = (n - 1) * stride;
    // e[i] = m[i] & m[i+s]; d[i] = e[i] | e[i-s]
    simd::bit_and(m.subspan(o, body), m.subspan(o + stride, body), std::span(eroded).subspan(o, body));
    std::copy_n(eroded.begin() + static_cast<std::ptrdiff_t>(o), stride, d.begin() + static_cast<std::ptrdiff_t>(o));
    simd::bit_or(std::span<const std::uint8_t>(eroded).subspan(o + stride, body),
                 std::span<const std::uint8_t>(eroded).subspan(o, body), d.subspan(o + stride, body));
  }
  return out;
}

BinaryMask prune_morphology(const BinaryMask& mask) {
  BinaryMask out = open_line(mask, 0);
  out = open_line(out, 1);
  out = open_line(out, 2);
  return largest_component(out);
}

NerveSegmentation reconstruct_nerve(const BinaryMask& nerve_prediction, const Volume3D& intensities,
                                    const NerveLandmarks& landmarks, const NerveParams& params) {
  params.validate();
  const BinaryMask refined = refine_by_intensity(nerve_prediction, intensities, landmarks.eye_end, params);
  NerveSegmentation seg;
  seg.landmarks = landmarks;
  seg.centerline = shortest_centerline(refined, landmarks, params);
  const BinaryMask tube = reconstruct_tube(seg.centerline, refined, landmarks, params);
  seg.mask = prune_morphology(tube);
  if (!seg.mask.test(landmarks.eye_end) || !seg.mask.test(landmarks.chiasm_end)) {
    // Put the inner core back and keep the component through the landmarks.
    NerveParams core = params;
    core.radius_eye = core.radius_chiasm = 0.0;
    BinaryMask joined = mask_or(seg.mask, reconstruct_tube(seg.centerline, refined, landmarks, core));
    const auto cc = connected_components_3d(joined, 26);
    seg.mask = cc.component_mask(cc.labels[nerve_prediction.geometry().index(landmarks.eye_end)]);
  }
  return seg;
}

NerveSegmentation segment_optic_nerve(const BinaryMask& nerve_prediction, const BinaryMask& eye,
                                      const BinaryMask& chiasm_half, const Volume3D& intensities,
                                      const NerveParams& params, Side side) {
  const auto landmarks = detect_landmarks(nerve_prediction, eye, chiasm_half, params.landmark_points, side);
  return reconstruct_nerve(nerve_prediction, intensities, landmarks, params);
}

}  // namespace oarpost
