#include "rl/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rl::par {

namespace {
int g_threads = -1;  // -1: uninitialized

int env_threads() {
    if (const char* s = std::getenv("RLAB_THREADS")) {
        int v = std::atoi(s);
        if (v >= 1) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}
}  // namespace

int max_threads() {
    if (g_threads < 0) g_threads = env_threads();
    return g_threads;
}

void set_threads(int n) { g_threads = n >= 1 ? n : env_threads(); }

}  // namespace rl::par
