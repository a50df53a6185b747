#include "plsreg/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plsreg::threading {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_max_threads(int count) {
  if (count < 1) count = 1;
#ifdef _OPENMP
  omp_set_num_threads(count);
#else
  (void)count;
#endif
}

void configure_from_env() {
  const char* raw = std::getenv("PLSREG_THREADS");
  if (raw == nullptr) return;
  try {
    int count = std::stoi(raw);
    if (count >= 1) set_max_threads(count);
  } catch (...) {
    // Malformed values leave the default untouched.
  }
}

}  // namespace plsreg::threading
