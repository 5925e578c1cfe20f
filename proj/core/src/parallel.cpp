#include "centerward/parallel.hpp"

#include <cstdlib>
#include <string>

#include "centerward/errors.hpp"

#ifdef CENTERWARD_HAVE_OPENMP
#include <omp.h>
#endif

namespace centerward {

void set_threads(int n) {
  if (n < 1) throw ConfigError("thread count must be >= 1");
#ifdef CENTERWARD_HAVE_OPENMP
  omp_set_num_threads(n);
#endif
}

int max_threads() {
#ifdef CENTERWARD_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int threads_from_env(int fallback) {
  const char* v = std::getenv("CENTERWARD_THREADS");
  if (!v || !*v) return fallback;
  try {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used != std::string(v).size() || n < 1) throw ConfigError("");
    return n;
  } catch (const std::exception&) {
    throw ConfigError(std::string("CENTERWARD_THREADS must be a positive integer, got '") + v + "'");
  }
}

}  // namespace centerward
