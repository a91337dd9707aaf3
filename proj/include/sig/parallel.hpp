#pragma once

#include <cstddef>
#include <functional>

namespace sig {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. After all workers
/// finish, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace sig
