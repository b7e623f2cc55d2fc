#include "swe1d/fft.hpp"

#include <mutex>

namespace swe {

namespace {
std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
}

void FftPlan::execute() { fftw_execute(plan_); }

std::size_t next_fft_size(std::size_t n) {
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2UL, 3UL, 5UL})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

}  // namespace swe
