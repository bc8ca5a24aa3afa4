#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qiope::parallel {

// Thread cap taken from the QIOPE_THREADS environment variable (0 = use all).
// Applied once at first use; set_max_threads overrides it.
int max_threads();
void set_max_threads(int n);

// Parallel loop over independent rows.  Each index writes only its own
// output slots, so the result is identical bit for bit to the serial loop
// regardless of thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    fn(static_cast<std::size_t>(i));
}

// Serial twin of parallel_for, kept as the reference implementation.
template <class Fn>
void serial_for(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

// Reduction in fixed index order.  Partial results are produced in
// parallel; the final sum always runs left to right so that parallel and
// serial execution agree bitwise.
template <class T>
T fixed_order_sum(const std::vector<T>& parts) {
  T acc{};
  for (const auto& p : parts) acc += p;
  return acc;
}

}  // namespace qiope::parallel
