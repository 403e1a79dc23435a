#pragma once

#include <cstddef>
#include <functional>

namespace variata {

// Number of worker threads: VARIATA_THREADS if set, else hardware concurrency.
unsigned thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous blocks; nested
// calls from inside a worker run serially. Exceptions are rethrown (first one
// by index wins) after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace variata
