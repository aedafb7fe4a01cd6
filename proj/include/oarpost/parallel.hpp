#pragma once

#include <cstddef>
#include <functional>

namespace oarpost {

/// Worker count used by internal fan-out (>= 1). Defaults to the
/// OARPOST_THREADS environment variable, else 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs fn(i) for i in [0, n). Each index must write disjoint outputs; the
/// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace oarpost
