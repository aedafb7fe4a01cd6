#pragma once

#include "oarpost/simd.hpp"

namespace oarpost::simd::detail {

const KernelTable& scalar_table();
#if defined(OARPOST_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

}  // namespace oarpost::simd::detail
