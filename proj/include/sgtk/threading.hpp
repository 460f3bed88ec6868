#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sgtk {

/// Worker count used by the parallel kernels: `requested` if positive,
/// else the SGTK_THREADS environment variable, else the hardware default.
int resolve_thread_count(int requested);

/// Runs fn(w) for every row window. Windows write disjoint output regions,
/// so any schedule or worker count produces bit-identical results.
template <class Fn>
void parallel_windows(std::size_t num_windows, int threads, Fn&& fn) {
#ifdef _OPENMP
  const int t = resolve_thread_count(threads);
  if (t > 1 && num_windows > 1) {
#pragma omp parallel for schedule(static) num_threads(t)
    for (long long w = 0; w < (long long)num_windows; ++w) {
      fn(std::size_t(w));
    }
    return;
  }
#else
  (void)threads;
#endif
  for (std::size_t w = 0; w < num_windows; ++w) fn(w);
}

}  // namespace sgtk
