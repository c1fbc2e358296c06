#pragma once

#include <cstddef>
#include <functional>

namespace wthermo {

// Number of workers used by parallel_for. Defaults to the hardware
// concurrency; values < 1 reset to that default.
void set_worker_count(int workers);
int worker_count();

// Runs body(begin, end) over a partition of [0, count) into contiguous
// ranges. Calls made from inside a running parallel_for execute serially on
// the calling thread. Results must not depend on the partition: callers
// write into per-index slots and reduce afterwards.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace wthermo
