#pragma once

#include <cstddef>
#include <functional>

namespace spaceopt {

/// requested <= 0 means "all hardware threads".
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to n_threads workers using a static
/// block partition. Each index owns its output slot, so results never depend
/// on the number of workers. The first exception thrown by any body is
/// rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, int n_threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace spaceopt
