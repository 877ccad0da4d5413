#include "periodbench/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace periodbench {

bool use_thread_team(Execution exec, std::ptrdiff_t n) {
#ifdef _OPENMP
  return exec == Execution::Parallel && n >= kParallelGrain && !omp_in_parallel() && omp_get_max_threads() > 1;
#else
  (void)exec;
  (void)n;
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace periodbench
