#include "sgtk/threading.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace sgtk {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SGTK_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return int(v);
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
#endif
}

}  // namespace sgtk
