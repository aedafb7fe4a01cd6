#pragma once

#include <optional>
#include <vector>

#include "oarpost/volume.hpp"

namespace oarpost {

/// Tuning of the graph-based optic nerve reconstruction. Radii are in
/// voxels, the landmark proximity threshold in mm.
struct NerveParams {
  int landmark_points = 30;
  double label_penalty = 100.0;     // cost of a node predicted negative
  double distance_weight = 0.001;   // per mm to the chiasm landmark
  double radius_eye = 7.0;          // search radius at the eye end
  double radius_chiasm = 3.0;       // search radius at the chiasm end
  double inner_radius = 2.5;        // unconditional tube radius
  double fat_quantile = 0.98;
  double fat_factor = 0.80;
  int fat_box_halfwidth = 7;
  double close_landmark_mm = 3.0;

  /// Throws Error naming the first violated constraint.
  void validate() const;
};

enum class Side { Left, Right };
const char* to_string(Side side);

struct NerveLandmarks {
  Index3 eye_end;
  Index3 chiasm_end;
  Side side = Side::Left;
};

/// Voxels from eye_end to chiasm_end; consecutive points step by one in y
/// and at most one in x and z.
struct CenterlinePath {
  std::vector<Index3> points;
  double total_cost = 0.0;  // sum of node costs entered after the start
};

struct NodeCost {
  double c_label = 0.0;
  double c_border = 0.0;
  double c_distance = 0.0;
  double total = 0.0;
};

/// P nerve voxels nearest the eye (mm) -> eye_end; P chiasm_side voxels
/// nearest the nerve -> chiasm_end; both rounded barycenters, and voxels
/// tied with the P-th distance are included. Falls back to
/// the eye voxel nearest the chiasm barycenter and the chiasm voxel nearest
/// the eye barycenter when the nerve prediction is empty.
/// Throws Error("missing prerequisite organ") if eye or chiasm is empty.
NerveLandmarks detect_landmarks(const BinaryMask& nerve_prediction, const BinaryMask& eye,
                                const BinaryMask& chiasm_side, int landmark_points,
                                Side side = Side::Left);

/// True iff the chiasm landmarks are closer than `threshold_mm`.
bool too_close(const NerveLandmarks& left, const NerveLandmarks& right, const Spacing3& spacing,
               double threshold_mm);

/// Intensity threshold from the fat-quantile box around `eye_end`:
/// fat_factor * q, or nullopt when the guard disables refinement.
std::optional<double> fat_threshold(const Volume3D& intensities, const Index3& eye_end,
                                    const NerveParams& params);

/// Clears prediction voxels brighter than fat_factor times the fat_quantile
/// of the box around eye_end. No-op when that threshold does not exceed the
/// box minimum.
BinaryMask refine_by_intensity(const BinaryMask& nerve_prediction, const Volume3D& intensities,
                               const Index3& eye_end, const NerveParams& params);

/// label 1: R - d_border; label 0: label_penalty. Plus distance_weight * d_target.
NodeCost node_cost(bool positive, double d_border, double d_target_mm, double radius,
                   const NerveParams& params);

/// Search radius at row y, linear from radius_eye at eye_end.y to
/// radius_chiasm at chiasm_end.y.
double interpolated_radius(const NerveLandmarks& landmarks, std::int64_t y,
                           const NerveParams& params);

/// Explicit node costs over a cuboid region; the edge into a node weighs
/// that node's cost.
struct LayeredCostGrid {
  BoundingBox3D roi;
  std::vector<double> cost;  // x fastest over roi

  double at(const Index3& p) const;
};

/// Dijkstra over the layered graph whose children of (x,y,z) are
/// (x+dx, y+s, z+dz), dx,dz in {-1,0,1}, s = sign(target.y - start.y).
/// Throws Error("landmarks not connectable") if the target is unreachable.
CenterlinePath shortest_monotone_path(const LayeredCostGrid& grid, const Index3& start,
                                      const Index3& target);

/// Node costs over the padded landmark cuboid, from the refined mask.
LayeredCostGrid build_cost_grid(const BinaryMask& refined, const NerveLandmarks& landmarks,
                                const NerveParams& params);

/// Centerline from eye_end to chiasm_end through the refined prediction.
CenterlinePath shortest_centerline(const BinaryMask& refined, const NerveLandmarks& landmarks,
                                   const NerveParams& params);

/// Inner balls (inner_radius) set unconditionally; outer balls (R(y)) keep
/// refined voxels only.
BinaryMask reconstruct_tube(const CenterlinePath& centerline, const BinaryMask& refined,
                            const NerveLandmarks& landmarks, const NerveParams& params);

/// Opening with a two-voxel line along one axis (0=x, 1=y, 2=z).
BinaryMask open_line(const BinaryMask& mask, int axis);

/// Openings along x, y, z, then the largest 26-connected component.
BinaryMask prune_morphology(const BinaryMask& mask);

struct NerveSegmentation {
  BinaryMask mask;
  NerveLandmarks landmarks;
  CenterlinePath centerline;
};

/// refine -> centerline -> tube -> prune, with the landmarks already known.
/// The result always holds both landmarks in one 26-connected component.
NerveSegmentation reconstruct_nerve(const BinaryMask& nerve_prediction,
                                    const Volume3D& intensities, const NerveLandmarks& landmarks,
                                    const NerveParams& params);

/// Full pipeline including landmark detection.
NerveSegmentation segment_optic_nerve(const BinaryMask& nerve_prediction, const BinaryMask& eye,
                                      const BinaryMask& chiasm_half, const Volume3D& intensities,
                                      const NerveParams& params, Side side = Side::Left);

}  // namespace oarpost
