#include "qiope/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace qiope::parallel {

namespace {
std::atomic<int> g_max_threads{-1};

int resolve_from_env() {
  if (const char* env = std::getenv("QIOPE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}
}  // namespace

int max_threads() {
  int n = g_max_threads.load(std::memory_order_relaxed);
  if (n <= 0) {
    n = resolve_from_env();
    g_max_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

void set_max_threads(int n) {
  g_max_threads.store(n > 0 ? n : resolve_from_env(),
                      std::memory_order_relaxed);
}

}  // namespace qiope::parallel
