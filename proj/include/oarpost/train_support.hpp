#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oarpost/mask_codec.hpp"
#include "oarpost/volume.hpp"

namespace oarpost {

enum class TernaryLabel : std::int8_t { Unknown = -1, Negative = 0, Positive = 1 };

/// Per-voxel ternary label of one class; 2D patches use nz = 1.
struct TernaryLabelField {
  GridGeometry geometry;
  std::string class_name;
  std::vector<TernaryLabel> labels;

  std::size_t count(TernaryLabel l) const;
};

/// Classes with ground truth copy it; the others are unknown except outside
/// an available ancestor (registry containment), where they are negative.
std::map<std::string, TernaryLabelField> reconstruct_labels(
    const std::map<std::string, BinaryMask>& available_gt, const ClassRegistry& registry);

/// Weights over a batch of fields of one class.
struct WeightBatch {
  std::string class_name;
  double target_weight = 0.5;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::size_t n_unknown = 0;
  bool positives_missing = false;  // N1 == 0: positive mass dropped
  bool negatives_missing = false;  // N0 == 0: negative mass dropped
  std::vector<std::vector<double>> weights;  // parallel to the input fields

  double positive_weight() const;
  double negative_weight() const;
};

/// unknown -> 0, positive -> t_c / N1, negative -> (1 - t_c) / N0, with the
/// counts taken over the whole batch. Throws Error unless 0 < t_c < 1.
WeightBatch pixel_weights(const std::vector<TernaryLabelField>& batch, double target_weight);

inline constexpr double kLogEpsilon = 1e-7;

/// -sum w * log(max(q, eps)), q = p for positives and 1 - p for negatives.
double weighted_cross_entropy(std::span<const double> probabilities,
                              const TernaryLabelField& labels, std::span<const double> weights,
                              double epsilon = kLogEpsilon);

/// Mean of the per-class losses. Throws Error for an empty list.
double total_loss(std::span<const double> per_class_losses);

/// Class bounding boxes per image id (two for bilateral classes).
using ClassBoxes = std::map<std::string, std::vector<BoundingBox3D>>;

struct PatchCenter {
  std::string image;
  Index3 center;
};

/// Uniform image among those with boxes, then a box with probability
/// proportional to its voxel count, then a uniform voxel in it.
/// Throws Error("class never annotated") when no image qualifies.
template <class Rng>
PatchCenter sample_patch_center(const ClassBoxes& boxes, Rng& rng);

PatchCenter sample_patch_center(const ClassBoxes& boxes, std::uint64_t seed);

enum class Orientation { Axial, Coronal, Sagittal };
const char* to_string(Orientation o);
Orientation parse_orientation(std::string_view s);

struct BatchEntry {
  std::string image;
  std::string center_class;
  Index3 center;
  Orientation orientation = Orientation::Axial;
};

struct BatchPlan {
  std::vector<BatchEntry> entries;
  /// "image,class,x,y,z,orientation" lines with a header.
  std::string to_csv() const;
};

/// Availability: class -> (image -> boxes).
using Availability = std::map<std::string, ClassBoxes>;

/// Entries 1..C centered on the registry classes in order, C+1..M on
/// `filler_class`. Throws Error if M < C.
BatchPlan build_batch_plan(const ClassRegistry& registry, const Availability& availability,
                           std::size_t batch_size, Orientation orientation, std::uint64_t seed,
                           const std::string& filler_class = "brain");

inline constexpr std::int64_t kDefaultPatchSize = 230;

/// In-plane sizes and (u, v) axes: axial (x, y), coronal (x, z),
/// sagittal (y, z).
struct Patch {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<float> values;
};
struct LabelPatch {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<TernaryLabel> labels;
};

/// Patch centered on `center`; outside the grid is zero.
Patch extract_patch(const Volume3D& volume, const Index3& center, std::int64_t width,
                    std::int64_t height, Orientation orientation);
LabelPatch extract_patch(const TernaryLabelField& field, const Index3& center, std::int64_t width,
                         std::int64_t height, Orientation orientation);

/// Boxes of every present class in one encoded ground truth. Bilateral
/// classes yield one box per non-empty side, split with the brain box when
/// brain is present and with the class's own box otherwise.
std::map<std::string, std::vector<BoundingBox3D>> class_boxes(const MultiLabelMask& gt);

}  // namespace oarpost

#include "oarpost/train_support_impl.hpp"
