#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oarpost/mask_codec.hpp"
#include "oarpost/optic_nerve.hpp"
#include "oarpost/volume.hpp"

namespace oarpost {

enum class PlaneFamily { Axial, Coronal, Sagittal };

/// Fills 2D background components that do not touch the slice border, for
/// every slice of one plane family (4-connected background).
BinaryMask fill_holes_in_planes(const BinaryMask& mask, PlaneFamily family);

/// Axial, then coronal, then sagittal hole filling.
BinaryMask triplanar_hole_fill(const BinaryMask& mask);

/// Keeps the largest 26-connected component; ties go to the component whose
/// first voxel in (z,y,x) order comes first.
BinaryMask largest_component(const BinaryMask& mask);

/// Drops 26-connected components smaller than `min_volume_mm3`.
BinaryMask filter_components_by_volume(const BinaryMask& mask, double min_volume_mm3);

/// inner AND outer.
BinaryMask constrain_inside(const BinaryMask& inner, const BinaryMask& outer);

struct SidedMasks {
  BinaryMask left;
  BinaryMask right;

  const BinaryMask& get(Side s) const { return s == Side::Left ? left : right; }
  BinaryMask& get(Side s) { return s == Side::Left ? left : right; }
};

/// Each 26-connected component goes to the side whose brain-box x bound is
/// nearer its barycenter. Low x is the patient's right; ties go right.
SidedMasks split_left_right(const BinaryMask& mask, const BoundingBox3D& brain_box);

/// Splits at the barycenter x: strictly lower x is the right half.
/// Throws Error("chiasm missing") for an empty chiasm.
SidedMasks chiasm_sides(const BinaryMask& chiasm);

/// Class names the pipeline keys its rules on.
struct ClassNames {
  std::string brain = "brain";
  std::string eye = "eye";
  std::string lens = "lens";
  std::string nerve = "optic_nerve";
  std::string chiasm = "optic_chiasm";
};

struct PostprocessParams {
  NerveParams nerve;
  double min_eye_volume_mm3 = 4000.0;
  ClassNames names;
};

struct NerveOutcome {
  Side side = Side::Left;
  bool reconstructed = false;
  std::optional<NerveLandmarks> landmarks;
  std::string note;  // why the fused prediction was kept, if it was
};

struct PostprocessResult {
  MultiLabelMask labels;  // same registry as the input
  MultiLabelMask sided;   // bilateral classes as <name>_right / <name>_left
  std::vector<NerveOutcome> nerves;
};

/// Registry with each bilateral class replaced by _right and _left entries.
RegistryPtr sided_registry(const ClassRegistry& base);

/// Brain: largest component + triplanar fill; eye: volume filter; other
/// registry containment rules (lens in eye, ...); chiasm: largest
/// component; optic nerves rebuilt per side; bilateral classes split with
/// the brain bounding box. Throws Error("brain prerequisite") without brain.
PostprocessResult postprocess_all(const MultiLabelMask& fused, const Volume3D& intensities,
                                  const PostprocessParams& params = {});

}  // namespace oarpost
