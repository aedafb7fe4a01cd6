#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oarpost/mask_codec.hpp"
#include "oarpost/volume.hpp"

namespace oarpost {

struct OverlapStats {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t ignored_fp = 0;
  std::size_t ignored_fn = 0;
  double dice = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;

  /// Fills the ratios from the counts; a zero denominator gives 0.
  void finalize();
};

/// 2|A n B| / (|A| + |B|). Throws Error("undefined overlap") if both empty.
double dice(const BinaryMask& pred, const BinaryMask& gt);

/// Plain voxel counts, no tolerance.
OverlapStats raw_overlap(const BinaryMask& pred, const BinaryMask& gt);

/// False positives 26-adjacent to gt and false negatives on the gt border
/// (gt voxels with a non-gt 26-neighbour; outside the grid counts as
/// non-gt) are moved to the ignored counts. Throws Error("empty ground
/// truth").
OverlapStats tolerant_overlap(const BinaryMask& pred, const BinaryMask& gt);

/// Undirected Hausdorff distance in mm. Throws Error("empty mask").
double hausdorff(const BinaryMask& a, const BinaryMask& b);

/// Symmetric mean nearest-neighbour distance in mm normalised by |A|+|B|.
/// Throws Error("empty mask").
double mean_distance(const BinaryMask& a, const BinaryMask& b);

/// Both directed nearest-neighbour distance lists at once (mm).
struct SurfaceDistances {
  std::vector<double> a_to_b;
  std::vector<double> b_to_a;
};
SurfaceDistances nearest_distances(const BinaryMask& a, const BinaryMask& b);

struct ClassMetrics {
  std::string name;
  bool pred_empty = false;
  bool gt_empty = false;
  OverlapStats raw;
  OverlapStats tolerant;
  double hausdorff_mm = 0.0;
  double mean_distance_mm = 0.0;

  bool scored() const { return !pred_empty && !gt_empty; }
};

struct MetricsReport {
  std::vector<ClassMetrics> classes;

  const ClassMetrics* find(const std::string& name) const;
  /// Aligned plain-text table.
  std::string to_text() const;
  /// "class,metric,value" lines with a header.
  std::string to_csv() const;
};

/// Per-class metrics; classes empty on either side are flagged only.
MetricsReport evaluate(const MultiLabelMask& pred, const MultiLabelMask& gt);

}  // namespace oarpost
