#pragma once

#include <cstddef>
#include <functional>

namespace eknot {

/// Worker count for data-parallel loops: EKNOT_THREADS if set (>= 1),
/// otherwise the hardware concurrency.
std::size_t worker_count();

/// Splits [0, count) into a fixed number of contiguous chunks, independent of
/// the worker count, and calls body(chunk, begin, end) for each. Callers
/// combine per-chunk results in chunk order, which keeps reductions bitwise
/// reproducible regardless of how many threads ran them.
void for_each_chunk(std::size_t count, std::size_t chunks,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace eknot
