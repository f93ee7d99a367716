#pragma once

#include <cstddef>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pfc {

/// Execution policy for the pair-scan kernels.
/// jobs == 1 selects the serial reference loop; jobs == 0 lets OpenMP pick;
/// any other value pins the OpenMP thread count.
struct ExecPolicy {
  int jobs = 0;

  static ExecPolicy serial() { return ExecPolicy{1}; }
  static ExecPolicy parallel(int jobs = 0) { return ExecPolicy{jobs == 1 ? 0 : jobs}; }
};

namespace detail {

/// Serial reference implementation. Kept distinct from the OpenMP path so the
/// two can be compared in tests and benchmarks.
template <typename Fn>
void for_each_index_serial(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

#ifdef _OPENMP
template <typename Fn>
void for_each_index_omp(std::size_t n, int jobs, Fn&& fn) {
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    fn(static_cast<std::size_t>(i));
  }
}
#endif

}  // namespace detail

/// Run fn(i) for i in [0, n). Each index must be independent of the others;
/// callers write into per-index slots and reduce afterwards in index order, so
/// the result is a pure function of the inputs regardless of the thread count.
template <typename Fn>
void for_each_index(std::size_t n, const ExecPolicy& exec, Fn&& fn) {
#ifdef _OPENMP
  if (exec.jobs != 1 && n > 1) {
    detail::for_each_index_omp(n, exec.jobs, fn);
    return;
  }
#endif
  (void)exec;
  detail::for_each_index_serial(n, fn);
}

}  // namespace pfc
