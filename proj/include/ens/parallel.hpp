#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ens {

// Every data-parallel kernel in this library takes an Exec and must produce
// bitwise-identical output under both policies and under any thread count.
// The pattern that guarantees this: parallel iterations write only to their
// own slot, and any floating-point reduction happens afterwards, serially,
// in index order. Exec::serial is the reference path the tests compare
// against and the baseline for the bench_kernels target.
enum class Exec { serial, parallel };

template <typename F>
void parallel_for(Exec exec, std::size_t n, F&& body) {
#ifdef _OPENMP
    if (exec == Exec::parallel) {
        #pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
}

inline void set_worker_count(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ens
