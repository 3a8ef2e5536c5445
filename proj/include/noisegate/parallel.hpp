#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace noisegate {

/// Number of worker threads to use; respects the NOISEGATE_THREADS
/// environment variable, otherwise the hardware concurrency.
unsigned worker_threads();

/// Runs body(i) for i in [0, n). Each index must write only to its own output
/// slot; with that discipline results are identical to sequential execution.
/// Nested calls run inline to avoid thread explosions.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace noisegate
