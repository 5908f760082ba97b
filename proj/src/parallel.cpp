#include "symcomp/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace symcomp::parallel {

int worker_count() { return omp_get_max_threads(); }

void set_worker_count(int n) { omp_set_num_threads(n < 1 ? 1 : n); }

int configure_from_env() {
  if (const char* env = std::getenv("SYMCOMP_THREADS")) {
    try {
      set_worker_count(std::stoi(env));
    } catch (const std::exception&) {
      // malformed value: keep the OpenMP default
    }
  }
  return worker_count();
}

}  // namespace symcomp::parallel
