#pragma once

#include <cstddef>
#include <functional>

namespace nemscat {

/// Worker count: NEMSCAT_THREADS if set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is processed by
/// exactly one thread and results must be written to per-index slots, so output never
/// depends on the schedule. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

} // namespace nemscat
