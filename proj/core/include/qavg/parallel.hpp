#pragma once

#include <cstddef>
#include <functional>

namespace qavg {

/// Worker count for parallel sweeps. Reads QAVG_THREADS, falling back to the
/// hardware concurrency. Always at least 1.
std::size_t worker_count();

/// Runs body(i) for i in [0, count). Each index is processed exactly once;
/// callers write into pre-sized, index-addressed storage so that results do
/// not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qavg
