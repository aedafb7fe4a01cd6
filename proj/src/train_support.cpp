#include "oarpost/train_support.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "oarpost/anatomy.hpp"
#include "oarpost/error.hpp"
#include "oarpost/measure.hpp"

namespace oarpost {

std::size_t TernaryLabelField::count(TernaryLabel l) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

std::map<std::string, TernaryLabelField> reconstruct_labels(const std::map<std::string, BinaryMask>& available_gt,
                                                            const ClassRegistry& registry) {
  if (available_gt.empty()) throw Error("no ground truth given");
  const GridGeometry& g = available_gt.begin()->second.geometry();
  for (const auto& [name, mask] : available_gt) {
    registry.at(name);
    require_same_grid(g, mask.geometry());
  }
  std::map<std::string, TernaryLabelField> out;
  for (const auto& c : registry.classes()) {
    TernaryLabelField f{g, c.name, std::vector<TernaryLabel>(g.voxel_count(), TernaryLabel::Unknown)};
    if (auto it = available_gt.find(c.name); it != available_gt.end()) {
      for (std::size_t i = 0; i < f.labels.size(); ++i) {
        f.labels[i] = it->second.test(i) ? TernaryLabel::Positive : TernaryLabel::Negative;
      }
    } else {
      std::set<std::string> ancestors;
      std::function<void(const ClassInfo&)> collect = [&](const ClassInfo& k) {
        for (const auto& p : k.parents) {
          if (ancestors.insert(p).second) collect(registry.at(p));
        }
      };
      collect(c);
      for (const auto& a : ancestors) {
        auto it = available_gt.find(a);
        if (it == available_gt.end()) continue;
        for (std::size_t i = 0; i < f.labels.size(); ++i) {
          if (!it->second.test(i)) f.labels[i] = TernaryLabel::Negative;
        }
      }
    }
    out.emplace(c.name, std::move(f));
  }
  return out;
}

double WeightBatch::positive_weight() const {
  return n_positive == 0 ? 0.0 : target_weight / double(n_positive);
}

double WeightBatch::negative_weight() const {
  return n_negative == 0 ? 0.0 : (1.0 - target_weight) / double(n_negative);
}

WeightBatch pixel_weights(const std::vector<TernaryLabelField>& batch, double target_weight) {
  if (!(target_weight > 0.0 && target_weight < 1.0)) throw Error("target weight must lie in (0, 1)");
  WeightBatch w;
  w.target_weight = target_weight;
  if (!batch.empty()) w.class_name = batch.front().class_name;
  for (const auto& f : batch) {
    w.n_positive += f.count(TernaryLabel::Positive);
    w.n_negative += f.count(TernaryLabel::Negative);
    w.n_unknown += f.count(TernaryLabel::Unknown);
  }
  w.positives_missing = w.n_positive == 0;
  w.negatives_missing = w.n_negative == 0;
  const double pos = w.positive_weight();
  const double neg = w.negative_weight();
  w.weights.reserve(batch.size());
  for (const auto& f : batch) {
    std::vector<double> row(f.labels.size(), 0.0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (f.labels[i] == TernaryLabel::Positive) row[i] = pos;
      else if (f.labels[i] == TernaryLabel::Negative) row[i] = neg;
    }
    w.weights.push_back(std::move(row));
  }
  return w;
}

double weighted_cross_entropy(std::span<const double> probabilities, const TernaryLabelField& labels,
                              std::span<const double> weights, double epsilon) {
  if (probabilities.size() != labels.labels.size() || weights.size() != labels.labels.size()) {
    throw Error("probability, label and weight fields differ in size");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double q;
    switch (labels.labels[i]) {
      case TernaryLabel::Positive: q = probabilities[i]; break;
      case TernaryLabel::Negative: q = 1.0 - probabilities[i]; break;
      default: continue;
    }
    loss -= weights[i] * std::log(std::max(q, epsilon));
  }
  return loss;
}

double total_loss(std::span<const double> per_class_losses) {
  if (per_class_losses.empty()) throw Error("no class losses");
  return std::accumulate(per_class_losses.begin(), per_class_losses.end(), 0.0) / double(per_class_losses.size());
}

PatchCenter sample_patch_center(const ClassBoxes& boxes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_patch_center(boxes, rng);
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::Axial: return "axial";
    case Orientation::Coronal: return "coronal";
    case Orientation::Sagittal: return "sagittal";
  }
  return "axial";
}

Orientation parse_orientation(std::string_view s) {
  if (s == "axial") return Orientation::Axial;
  if (s == "coronal") return Orientation::Coronal;
  if (s == "sagittal") return Orientation::Sagittal;
  throw Error("unknown orientation: " + std::string(s));
}

std::string BatchPlan::to_csv() const {
  std::ostringstream out;
  out << "image,class,x,y,z,orientation\n";
  for (const auto& e : entries) {
    out << e.image << ',' << e.center_class << ',' << e.center.x << ',' << e.center.y << ',' << e.center.z << ','
        << to_string(e.orientation) << '\n';
  }
  return out.str();
}

BatchPlan build_batch_plan(const ClassRegistry& registry, const Availability& availability, std::size_t batch_size,
                           Orientation orientation, std::uint64_t seed, const std::string& filler_class) {
  if (batch_size < registry.size()) throw Error("batch size smaller than the number of classes");
  registry.at(filler_class);
  std::mt19937_64 rng(seed);
  auto boxes_of = [&](const std::string& name) -> const ClassBoxes& {
    static const ClassBoxes none;
    auto it = availability.find(name);
    return it == availability.end() ? none : it->second;
  };
  auto entry = [&](const std::string& name) {
    try {
      const auto c = sample_patch_center(boxes_of(name), rng);
      return BatchEntry{c.image, name, c.center, orientation};
    } catch (const Error&) {
      throw Error("class never annotated: " + name);
    }
  };
  BatchPlan plan;
  for (const auto& c : registry.classes()) plan.entries.push_back(entry(c.name));
  while (plan.entries.size() < batch_size) plan.entries.push_back(entry(filler_class));
  return plan;
}

namespace {

// (u, v) voxel offsets of a patch pixel in each plane family.
Index3 patch_voxel(const Index3& c, std::int64_t du, std::int64_t dv, Orientation o) {
  switch (o) {
    case Orientation::Axial: return {c.x + du, c.y + dv, c.z};
    case Orientation::Coronal: return {c.x + du, c.y, c.z + dv};
    case Orientation::Sagittal: return {c.x, c.y + du, c.z + dv};
  }
  return c;
}

template <class T, class Get>
std::vector<T> gather(const GridGeometry& g, const Index3& center, std::int64_t width, std::int64_t height,
                      Orientation o, T fill, Get get) {
  if (width < 1 || height < 1) throw Error("patch size must be positive");
  if (!g.contains(center)) throw Error("patch center outside the grid");
  std::vector<T> out(static_cast<std::size_t>(width * height), fill);
  const std::int64_t u0 = -(width / 2);
  const std::int64_t v0 = -(height / 2);
  for (std::int64_t v = 0; v < height; ++v) {
    for (std::int64_t u = 0; u < width; ++u) {
      const Index3 p = patch_voxel(center, u0 + u, v0 + v, o);
      if (g.contains(p)) out[static_cast<std::size_t>(v * width + u)] = get(g.index(p));
    }
  }
  return out;
}

}  // namespace

Patch extract_patch(const Volume3D& volume, const Index3& center, std::int64_t width, std::int64_t height,
                    Orientation orientation) {
  auto values = volume.values();
  return {width, height,
          gather<float>(volume.geometry(), center, width, height, orientation, 0.0F,
                        [&](std::size_t i) { return values[i]; })};
}

LabelPatch extract_patch(const TernaryLabelField& field, const Index3& center, std::int64_t width,
                         std::int64_t height, Orientation orientation) {
  if (field.labels.size() != field.geometry.voxel_count()) throw Error("label field size mismatch");
  return {width, height,
          gather<TernaryLabel>(field.geometry, center, width, height, orientation, TernaryLabel::Negative,
                               [&](std::size_t i) { return field.labels[i]; })};
}

std::map<std::string, std::vector<BoundingBox3D>> class_boxes(const MultiLabelMask& gt) {
  std::map<std::string, std::vector<BoundingBox3D>> out;
  std::optional<BoundingBox3D> brain_box;
  if (gt.registry().contains("brain")) brain_box = bounding_box(decode(gt, "brain"));
  for (const auto& c : gt.registry().classes()) {
    const BinaryMask m = decode(gt, c.name);
    const auto own = bounding_box(m);
    if (!own) continue;
    auto& boxes = out[c.name];
    if (!c.bilateral) {
      boxes.push_back(*own);
      continue;
    }
    const auto sides = split_left_right(m, brain_box ? *brain_box : *own);
    for (const BinaryMask* s : {&sides.right, &sides.left}) {
      if (auto b = bounding_box(*s)) boxes.push_back(*b);
    }
  }
  return out;
}

}  // namespace oarpost
