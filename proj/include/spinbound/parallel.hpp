#pragma once

#include <cstddef>
#include <functional>

namespace spinbound {

/// Worker count from SPINBOUND_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// visited exactly once; body must not touch shared mutable state except its
/// own output slot. Exceptions from any worker are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spinbound
