#pragma once

#include <cstddef>
#include <functional>

namespace unionclust {

/// Worker cap: UNIONCLUST_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t effective_thread_count();

/// Runs body(i) for every i in [0, count). Iterations must write disjoint
/// state. The execution order is unspecified, but since each index derives
/// its own seeds the combined result matches a sequential run.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace unionclust
