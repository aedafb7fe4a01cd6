#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oarpost/mask_codec.hpp"
#include "oarpost/optic_nerve.hpp"
#include "oarpost/volume.hpp"

namespace oarpost {

/// Default phantom grid: 160 x 180 x 100 at 0.7 x 0.7 x 0.9 mm.
GridGeometry default_phantom_geometry();

/// Reference intensities of the synthetic tissues.
struct PhantomIntensities {
  float background = 10.0F;
  float brain = 60.0F;
  float brainstem = 66.0F;
  float hippocampus = 52.0F;
  float eye = 30.0F;
  float lens = 80.0F;
  float fat = 150.0F;
  float nerve = 55.0F;
  float chiasm = 55.0F;
  float pituitary = 70.0F;
  float noise_sigma = 2.0F;
};

struct Phantom {
  Volume3D intensities;
  MultiLabelMask truth;  // default registry
  /// Generating polylines of the right and left optic nerves (voxel
  /// coordinates, eye end first).
  std::array<std::vector<Point3>, 2> nerve_axes;
};

/// Synthetic head: ellipsoidal brain with a brainstem, two eyes with
/// lenses and a hyperintense fat shell, curved optic nerves joining an
/// X-shaped chiasm, pituitary, hippocampi. Shapes are laid out in mm, so
/// any grid covering the default field of view works.
/// Throws Error("geometry too small") below 64 voxels per axis.
Phantom generate_phantom(std::uint64_t seed, const GridGeometry& geometry = default_phantom_geometry());

struct ClassCorruption {
  double hole_rate = 0.0;            // fraction of class voxels carved as interior holes
  double erase_span_fraction = 0.0;  // length fraction of each erased span (along y)
  int erase_span_count = 0;          // number of components receiving a span
  int distractors = 0;               // distant false-positive blobs
  double jitter = 0.0;               // per-variant boundary flip probability

  bool active() const {
    return hole_rate > 0 || (erase_span_fraction > 0 && erase_span_count > 0) || distractors > 0 ||
           jitter > 0;
  }
};

struct CorruptionSpec {
  std::map<std::string, ClassCorruption> classes;

  /// brain holes 0.05; one optic nerve span of 30 %; three distractors per
  /// brain, eye, lens, optic nerve and chiasm; 2 % boundary jitter.
  static CorruptionSpec standard();
  void validate() const;
};

enum class CorruptionKind { Hole, EraseSpan, Distractor, Jitter };
const char* to_string(CorruptionKind k);

struct CorruptionEvent {
  std::string class_name;
  CorruptionKind kind = CorruptionKind::Hole;
  Index3 center;
  double radius_mm = 0.0;
  std::size_t voxels = 0;
  std::array<bool, 3> variants{};  // axial, coronal, sagittal
};

struct CorruptedPrediction {
  std::array<MultiLabelMask, 3> variants;  // axial, coronal, sagittal
  std::vector<CorruptionEvent> log;
};

/// Holes and distractors are shared by exactly two of the three variants
/// (rotating), spans by all three, jitter is private per variant. A
/// majority vote therefore keeps holes, spans and distractors and mostly
/// removes jitter.
CorruptedPrediction corrupt_prediction(const MultiLabelMask& truth, std::uint64_t seed,
                                       const CorruptionSpec& spec);

}  // namespace oarpost
