#pragma once

#include "oarpost/mask_codec.hpp"
#include "oarpost/volume.hpp"

namespace oarpost {

/// Voxel set iff at least two of the three inputs are set.
BinaryMask majority_vote(const BinaryMask& a, const BinaryMask& b, const BinaryMask& c);

/// Per-class majority vote of the axial, coronal and sagittal predictions.
/// Evaluated bitwise on the label words, which equals decoding each class,
/// voting and re-encoding.
MultiLabelMask fuse_multiclass(const MultiLabelMask& axial, const MultiLabelMask& coronal,
                               const MultiLabelMask& sagittal);

}  // namespace oarpost
