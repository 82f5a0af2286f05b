#pragma once

#include <cstddef>
#include <functional>

namespace entwine {

/// Worker count: hardware concurrency, capped by ENTWINE_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace entwine
