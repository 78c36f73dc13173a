#pragma once

#include <cstddef>
#include <functional>

namespace alsm {

// Resolves a requested worker count: values <= 0 mean "use all hardware threads".
int resolve_jobs(int requested);

// Runs fn(i) for every i in [0, n) on up to `jobs` worker threads. Work items
// must write only to per-index slots; the first exception thrown by any item
// is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace alsm
