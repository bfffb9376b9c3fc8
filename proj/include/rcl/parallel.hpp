#pragma once

#include <cstdint>
#include <functional>

namespace rcl {

/// Worker-thread cap: min(hardware_concurrency, RCL_THREADS). RCL_THREADS
/// unset or invalid means the hardware count.
int max_threads();

/// Runs fn(begin, end) over static contiguous chunks of [0, n).
/// The work split depends only on n and the thread count, and every element
/// is processed by exactly one invocation, so results that write disjoint
/// slots are bitwise independent of the thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace rcl
