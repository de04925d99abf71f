// parallel.cpp — Thread cap from the environment

#include "semigroup/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace semigroup {

int thread_cap()
{
    const int fallback = omp_get_max_threads();
    const char* env = std::getenv("SEMIGROUP_LAB_THREADS");
    if (env == nullptr || *env == '\0') return fallback;
    try {
        const int n = std::stoi(env);
        return n > 0 ? n : fallback;
    } catch (const std::exception&) {
        return fallback;
    }
}

} // namespace semigroup
