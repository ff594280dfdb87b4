#pragma once

#include <cstddef>
#include <functional>

namespace hdg {

/// Global worker count for batch loops. 1 (the default) runs loops serially
/// and is bit-reproducible; 0 selects the hardware concurrency.
void set_threads(int n);
int threads();

/// Runs fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. Chunks are disjoint, so bodies may write freely to per-index data.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace hdg
