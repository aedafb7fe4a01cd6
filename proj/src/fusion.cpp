#include "oarpost/fusion.hpp"

#include "oarpost/simd.hpp"

namespace oarpost {

BinaryMask majority_vote(const BinaryMask& a, const BinaryMask& b, const BinaryMask& c) {
  require_same_grid(a.geometry(), b.geometry());
  require_same_grid(a.geometry(), c.geometry());
  BinaryMask out(a.geometry());
  simd::majority3(a.bits(), b.bits(), c.bits(), out.bits());
  return out;
}

MultiLabelMask fuse_multiclass(const MultiLabelMask& axial, const MultiLabelMask& coronal,
                               const MultiLabelMask& sagittal) {
  require_compatible(axial, coronal);
  require_compatible(axial, sagittal);
  MultiLabelMask out(axial.geometry(), axial.registry_ptr());
  simd::majority3(axial.words(), coronal.words(), sagittal.words(), out.words());
  return out;
}

}  // namespace oarpost
