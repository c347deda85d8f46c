#pragma once

#include <cstdint>
#include <functional>

namespace abcweight {

// Runs fn(i) for i in [0, n), splitting the range over `threads` workers.
// Callers write results into per-index slots; no synchronization is added.
// threads <= 1 stays on the calling thread. The first exception thrown by a
// worker is rethrown after all workers join.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

}  // namespace abcweight
