#include "lrexp/parallel.hpp"

#include <cstdlib>

namespace lrexp {

int default_thread_count() {
  if (const char* env = std::getenv("LREXP_THREADS")) {
    const int value = std::atoi(env);
    if (value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace lrexp
