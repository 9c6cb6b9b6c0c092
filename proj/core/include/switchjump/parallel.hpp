#pragma once

#include <cstddef>
#include <functional>

namespace switchjump {

// Number of worker threads: SWITCHJUMP_THREADS when set to a positive integer
// (at most 256), otherwise the hardware concurrency.
unsigned worker_count();

// Calls body(i) for every i in [0, n). Work is distributed dynamically across
// worker_count() threads; callers write results into per-index slots so the
// outcome does not depend on scheduling. If any call throws, the exception of
// the smallest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace switchjump
