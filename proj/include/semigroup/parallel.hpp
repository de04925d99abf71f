// parallel.hpp — Thread cap and serial/parallel switch for the OpenMP kernels

#pragma once

#include <exception>
#include <mutex>

namespace semigroup {

// Kernels that run OpenMP loops take this switch; the serial path is the
// reference the parallel path is tested against (results are bitwise equal).
enum class Execution { serial, parallel };

// Number of threads used by parallel kernels: SEMIGROUP_LAB_THREADS when set
// to a positive integer, otherwise the OpenMP default.
int thread_cap();

// Carries the first exception out of an OpenMP loop body, which must not throw.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& body) noexcept
    {
        try {
            body();
        } catch (...) {
            const std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const
    {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

} // namespace semigroup
