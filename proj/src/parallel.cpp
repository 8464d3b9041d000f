#include "nonrecip/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nonrecip {

int sweep_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("NONRECIP_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap > 0 && cap < n) n = cap;
        } catch (const std::exception&) {
            // unparsable values are ignored
        }
    }
    return n < 1 ? 1 : n;
#else
    return 1;
#endif
}

}  // namespace nonrecip
