#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace natform::par {

/// Worker count for parallel_for. 0 restores the default
/// (NATCHECK_THREADS env var if set, else hardware concurrency).
void set_threads(int n);
int threads();

/// Runs fn(i) for i in [0, n). Each index is processed exactly once; results
/// must be written to disjoint slots so the outcome is independent of the
/// partitioning. May run inline when n is small.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Fixed-order pairwise (cascade) summation. Bit-reproducible for a given
/// buffer regardless of thread count, since the buffer layout is fixed.
double pairwise_sum(std::span<const double> xs);

}  // namespace natform::par
