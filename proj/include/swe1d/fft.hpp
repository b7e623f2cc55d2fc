#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <fftw3.h>

namespace swe {

/// Forward complex-to-complex FFTW plan of fixed size with owned buffers.
/// Plan creation/destruction is serialized internally (the FFTW planner is
/// not thread-safe); execution on the owned buffers is safe per instance.
class FftPlan {
  public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const { return n_; }
    fftw_complex* in() { return in_; }
    const fftw_complex* out() const { return out_; }
    void execute();

  private:
    std::size_t n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

/// Smallest 5-smooth integer >= n (FFT-friendly size).
std::size_t next_fft_size(std::size_t n);

}  // namespace swe
