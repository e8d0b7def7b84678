#ifndef ACCESSFLOW_PARALLEL_HPP
#define ACCESSFLOW_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace accessflow {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). The first failure by index is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace accessflow

#endif  // ACCESSFLOW_PARALLEL_HPP
