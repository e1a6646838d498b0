#ifndef PSIDO_PARALLEL_HPP
#define PSIDO_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace psido {

/// Worker count used by parallel loops; 0 selects hardware concurrency.
void set_default_jobs(int jobs);
int default_jobs();

/// Runs body(i) for i in [0, n) over contiguous blocks. Each index is
/// visited exactly once, so results written by index are deterministic
/// regardless of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace psido

#endif  // PSIDO_PARALLEL_HPP
