#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nlsim {

// Worker count: explicit value if > 0, else NLSIM_THREADS, else hardware.
int resolve_threads(int requested);

// Runs body(i) for i in [0, n) on static contiguous chunks. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
// The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation; fixed association for a given length.
double pairwise_sum(std::span<const double> xs);

}  // namespace nlsim
