#pragma once

// Thin OpenMP helpers. Work items are indexed; exceptions thrown by items are
// captured and the one with the lowest index is rethrown after the loop, so
// error reporting does not depend on the schedule.

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace cusp::par {

/// Caps the number of threads used by subsequent parallel kernels.
inline void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

inline int max_threads() { return omp_get_max_threads(); }

template <class Fn>
void for_each_index(std::size_t count, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
    bool failed = false;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic) reduction(|| : failed)
    for (long long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
            failed = true;
        }
    }
    if (failed) {
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
}

}  // namespace cusp::par
