#pragma once

#include <optional>

#include "oarpost/volume.hpp"

namespace oarpost {

enum class Interpolation { Trilinear, Nearest };

/// Resamples onto `target_spacing` keeping the origin. Output sizes are
/// round(extent / spacing) with a minimum of 1; sample positions beyond the
/// last input voxel clamp to the border.
Volume3D resample(const Volume3D& volume, const Spacing3& target_spacing,
                  Interpolation mode = Interpolation::Trilinear);
/// Nearest-neighbour resampling of a mask; the result is again binary.
BinaryMask resample(const BinaryMask& mask, const Spacing3& target_spacing);

/// Crops or pads to `target_sizes`. x and y stay centered; z is anchored at
/// the superior end, so extra slices are added (or dropped) inferiorly.
Volume3D crop_or_pad(const Volume3D& volume, const Sizes3& target_sizes, float fill = 0.0F);
BinaryMask crop_or_pad(const BinaryMask& mask, const Sizes3& target_sizes);

inline constexpr double kDefaultIntensityScale = 100.0;

/// out = in / max(in) * scale. With `percentile` set (0 < p <= 1) the
/// reference is that empirical quantile instead of the exact maximum.
/// Throws Error("degenerate intensity range") if the reference is <= 0.
Volume3D normalize_intensity(const Volume3D& volume, double scale = kDefaultIntensityScale,
                             std::optional<double> percentile = std::nullopt);

}  // namespace oarpost
