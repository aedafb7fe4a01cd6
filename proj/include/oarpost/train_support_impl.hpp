#pragma once

#include <random>

#include "oarpost/error.hpp"

namespace oarpost {

template <class Rng>
PatchCenter sample_patch_center(const ClassBoxes& boxes, Rng& rng) {
  std::vector<const ClassBoxes::value_type*> images;
  for (const auto& entry : boxes) {
    if (!entry.second.empty()) images.push_back(&entry);
  }
  if (images.empty()) throw Error("class never annotated");

  std::uniform_int_distribution<std::size_t> pick_image(0, images.size() - 1);
  const auto& [image, image_boxes] = *images[pick_image(rng)];

  std::vector<double> volumes;
  volumes.reserve(image_boxes.size());
  for (const auto& b : image_boxes) volumes.push_back(static_cast<double>(b.voxel_count()));
  std::discrete_distribution<std::size_t> pick_box(volumes.begin(), volumes.end());
  const BoundingBox3D& box = image_boxes[pick_box(rng)];

  std::uniform_int_distribution<std::int64_t> ux(box.min.x, box.max.x);
  std::uniform_int_distribution<std::int64_t> uy(box.min.y, box.max.y);
  std::uniform_int_distribution<std::int64_t> uz(box.min.z, box.max.z);
  Index3 p;
  p.x = ux(rng);
  p.y = uy(rng);
  p.z = uz(rng);
  return {image, p};
}

}  // namespace oarpost
