#pragma once

// Vectorizable inner loops, compiled with fast-math in their own TU.
// NaN-sensitive checks (blow-up detection) live in the callers.

#include <cstddef>

namespace swe::hot {

/// un[j] = uc[j-1] + uc[j+1] - um[j] + (2 + sin(uc[j])) * w[j], j in [1, nx-1)
void leapfrog_row_sin2(const double* um, const double* uc, const double* w, double* un,
                       std::size_t nx);

/// same with sigma = k
void leapfrog_row_const(double k, const double* um, const double* uc, const double* w, double* un,
                        std::size_t nx);

/// same with sigma(x) = sqrt(1 + x^2)
void leapfrog_row_sqrt1p(const double* um, const double* uc, const double* w, double* un,
                         std::size_t nx);

/// out[2k], out[2k+1] from uniforms via Box-Muller; u1 in (0,1], u2 in [0,1)
void box_muller(const double* u1, const double* u2, double* out, std::size_t pairs);

/// dst[k] = scale[k] * (a[k] + i b[k]) with a,b interleaved in normals[2k], [2k+1];
/// dst is FFTW complex layout (re, im).
void scale_into_complex(const double* normals, const double* scale, double* dst_reim,
                        std::size_t n);

}  // namespace swe::hot
