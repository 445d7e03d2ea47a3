#pragma once

#include <cstddef>
#include <functional>

namespace spdemc {

/// 0 means "use all hardware threads".
unsigned resolve_threads(unsigned hint) noexcept;

/// Calls body(task) for every task in [0, n_tasks) using up to `threads`
/// workers. Tasks are claimed dynamically, so body must only write to
/// task-indexed storage; callers reduce afterwards in task order, which keeps
/// results independent of the worker count. The first exception is rethrown.
void parallel_for(std::size_t n_tasks, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace spdemc
