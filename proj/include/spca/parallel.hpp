#pragma once

#include <cstddef>
#include <functional>

namespace spca {

/// Resolves a requested thread count: >0 is taken as is; 0 falls back to
/// SPCA_THREADS, then std::thread::hardware_concurrency().
unsigned resolve_threads(unsigned requested);

/// Runs job(i) for i in [0, count) on up to `threads` workers. Jobs must be
/// independent and write only to their own slots; the first exception thrown
/// (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job);

}  // namespace spca
