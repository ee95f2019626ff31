#pragma once

#include <functional>

namespace nlstab {

/// Hardware concurrency, at least 1.
int default_workers();

/// Calls fn(i) for every i in [0, n) on up to `workers` threads (workers <= 0
/// selects default_workers()). Work is handed out in index order; if any call
/// throws, the exception of the lowest failing index is rethrown after all
/// threads have joined.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace nlstab
