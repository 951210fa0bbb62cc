#pragma once

#include <cstddef>
#include <functional>

namespace ethfraud {

// Maps a requested thread count to an effective one (<= 0 means all cores).
int resolve_threads(int requested);

// Runs fn(i) for every i in [0, n). Work items are claimed by index, so code
// that writes results keyed by i is independent of the thread count and of
// scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ethfraud
