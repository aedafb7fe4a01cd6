#pragma once

#include <optional>

#include "oarpost/volume.hpp"

namespace oarpost {

/// Tightest box around the set voxels; nullopt for an empty mask.
std::optional<BoundingBox3D> bounding_box(const BinaryMask& mask);

/// Mean of the set-voxel index triples. Throws Error("empty mask").
Point3 barycenter(const BinaryMask& mask);

/// Set-voxel count times voxel volume, in mm^3.
double physical_volume(const BinaryMask& mask);

/// Sub-grid copy; the origin is shifted so physical positions are kept.
BinaryMask crop(const BinaryMask& mask, const BoundingBox3D& box);
Volume3D crop(const Volume3D& volume, const BoundingBox3D& box);

}  // namespace oarpost
