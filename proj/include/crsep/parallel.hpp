#pragma once

#include <cstddef>
#include <functional>

namespace crsep {

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency). Work items are claimed dynamically; the first exception
/// thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

unsigned resolve_workers(unsigned requested);

}  // namespace crsep
