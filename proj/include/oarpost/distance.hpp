#pragma once

#include <vector>

#include "oarpost/volume.hpp"

namespace oarpost {

/// Exact squared Euclidean distance from every voxel center to the nearest
/// set voxel of `features`, with per-axis weights `spacing` (pass {1,1,1}
/// for voxel units). Every entry is +infinity when `features` is empty.
///
/// Separable lower-envelope transform (Felzenszwalb & Huttenlocher), one
/// pass per axis; results are exact up to floating-point rounding of the
/// squared sums.
std::vector<double> squared_distance_field(const BinaryMask& features, const Spacing3& spacing);

/// Same as above in the mask's physical spacing.
std::vector<double> squared_distance_field(const BinaryMask& features);

}  // namespace oarpost

namespace oarpost {

/// Physical distance (mm) from every set voxel of `from`, in raster order,
/// to the nearest set voxel of `to`; +infinity when `to` is empty. The
/// transform runs over the joint bounding box only.
std::vector<double> nearest_feature_distances(const BinaryMask& from, const BinaryMask& to);

}  // namespace oarpost
