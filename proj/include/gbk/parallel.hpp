#pragma once

#include <cstddef>
#include <functional>

namespace gbk {

/// Thread count after applying GBK_THREADS; 0 or negative means all cores.
int resolve_threads(int requested);

/// Static partition of [0, n) into contiguous chunks, one per worker.
/// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, int threads, std::function<void(std::size_t, std::size_t)> const& body);

} // namespace gbk
