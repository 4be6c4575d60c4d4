#pragma once

#include <cstddef>
#include <functional>

namespace cf {

/// Worker count: COHERENTFLOW_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, count). Each index is processed by exactly one
/// worker, so results written per index do not depend on the worker count.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace cf
