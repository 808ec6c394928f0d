#pragma once

#include <cstddef>
#include <functional>

namespace netspectra {

/// Worker count: hardware concurrency, capped by NETSPECTRA_THREADS when set.
std::size_t thread_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// `body(worker, begin, end)` for each. Chunk boundaries depend only on `n`
/// and the worker count, so reductions indexed by `worker` are reproducible.
void parallel_chunks(std::size_t n, std::size_t workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace netspectra
