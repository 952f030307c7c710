#pragma once

#include <cstddef>
#include <functional>

namespace sparse_jacobi {

// Worker count: SPARSE_JACOBI_THREADS if set, else hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);

// Calls body(i) for i in [0, n). Each index is handled exactly once, results depend only on i,
// so output is identical for any thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sparse_jacobi
