#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tailex {

/// Number of worker threads the OpenMP kernels will use (1 without OpenMP).
inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

/// Runs body(i) for i in [0, n). Each index must write to disjoint state;
/// outputs are then identical to the serial loop regardless of schedule.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) body(i);
#endif
}

/// Serial reference for parallel_for, kept for equivalence tests and the
/// benchmark comparison.
template <typename Body>
void serial_for(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace tailex
