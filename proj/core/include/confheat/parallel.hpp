#pragma once

#include <cstddef>
#include <functional>

namespace confheat {

/// Hardware concurrency, at least 1.
unsigned default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers with a static
/// partition. Callers write results by index and reduce afterwards in index
/// order, so outputs do not depend on the thread count. The exception raised
/// at the lowest index (if any) is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace confheat
