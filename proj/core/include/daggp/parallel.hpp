#pragma once

#include <cstddef>
#include <functional>

namespace daggp {

/// Worker count from DAGGP_THREADS, else the hardware concurrency (at least 1).
std::size_t default_workers();

/// Runs body(i) for i in [0, n) on up to `workers` threads (0 = default).
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

} // namespace daggp
