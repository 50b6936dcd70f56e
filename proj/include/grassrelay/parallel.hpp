#pragma once

#include <cstddef>
#include <functional>

namespace grassrelay {

// Worker count: GRASSRELAY_THREADS if set (>= 1), else hardware concurrency.
std::size_t worker_count();

// Calls body(i) for i in [0, count) across worker threads. Each index runs
// exactly once; callers write results into per-index slots so the outcome
// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace grassrelay
