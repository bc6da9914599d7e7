#pragma once

// OpenMP compatibility layer. Every kernel that has a parallel variant keeps a
// serial reference path selected through Execution; both must produce
// bit-identical results.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <string>

namespace pareto {

enum class Execution { Serial, Parallel };

inline int maxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void setThreads(int count) {
#ifdef _OPENMP
  if (count > 0) omp_set_num_threads(count);
#else
  (void)count;
#endif
}

/// Applies PARETO_THREADS from the environment, if set to a positive integer.
inline void applyThreadEnvironment() {
  if (const char* env = std::getenv("PARETO_THREADS")) {
    try {
      setThreads(std::stoi(env));
    } catch (...) {
    }
  }
}

inline bool parallelEnabled(Execution exec) {
#ifdef _OPENMP
  return exec == Execution::Parallel;
#else
  (void)exec;
  return false;
#endif
}

}  // namespace pareto
